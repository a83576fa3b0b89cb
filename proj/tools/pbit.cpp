// pbit: command-line front end for the experiment runners.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "pbit/pbit.hpp"

namespace {

struct Output {
    std::string path;

    template <typename Fn>
    void write(Fn fn) const {
        if (path.empty() || path == "-") {
            fn(std::cout);
            return;
        }
        std::ofstream out(path);
        if (!out) {
            throw pbit::config_error("cannot open output file " + path);
        }
        fn(out);
    }
};

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw pbit::config_error("cannot open input file " + path);
    }
    return in;
}

// Options shared by the experiment subcommands. Names match the config-file keys.
void bind_experiment(CLI::App *sub, pbit::ExperimentConfig &c) {
    sub->add_option("--seed", c.seed, "Master seed")->capture_default_str();
    sub->add_option("--trials", c.trials, "Trials per instance and grid point")->capture_default_str();
    sub->add_option("--n", c.n, "Logical Max-Cut size")->capture_default_str();
    sub->add_option("--edge_probability", c.edge_probability, "ER edge probability")->capture_default_str();
    sub->add_option("--instance_seed", c.instance_seed, "Generator seed of instance 0")->capture_default_str();
    sub->add_option("--instances", c.instances, "Random instances per size")->capture_default_str();
    sub->add_option("--chain_length", c.chain_length, "Physical nodes per logical node")->capture_default_str();
    sub->add_option("--k", c.k, "Degree bound (0: smallest bound for the chain length)")->capture_default_str();
    sub->add_option("--w0_grid", c.w0_grid, "Copy-edge strengths")->delimiter(',')->capture_default_str();
    sub->add_option("--w0_per_k", c.w0_per_k, "W0 = w0_per_k * k for size grids")->capture_default_str();
    sub->add_option("--beta_first", c.beta_first)->capture_default_str();
    sub->add_option("--beta_last", c.beta_last)->capture_default_str();
    sub->add_option("--beta_steps", c.beta_steps)->capture_default_str();
    sub->add_option("--sweeps_per_beta", c.sweeps_per_beta)->capture_default_str();
    sub->add_option("--readout_tail", c.readout_tail, "Final sweeps kept as readouts")->capture_default_str();
    sub->add_option("--beta", c.beta, "Fixed inverse temperature for sampling")->capture_default_str();
    sub->add_option("--sweeps", c.sweeps, "Total sampling sweeps")->capture_default_str();
    sub->add_option("--chains", c.chains, "Independent sampling chains")->capture_default_str();
    sub->add_flag("--chromatic,!--sequential", c.chromatic, "Graph-colored parallel sweeps");
    sub->add_option("--sizes", c.sizes, "Logical sizes (dense)")->delimiter(',')->capture_default_str();
    sub->add_option("--sparse_sizes", c.sparse_sizes, "Logical sizes (sparse)")->delimiter(',')->capture_default_str();
    sub->add_option("--chain_lengths", c.chain_lengths, "Topologies, 1 = dense")->delimiter(',')->capture_default_str();
    sub->add_option("--anneal_lengths", c.anneal_lengths, "Total anneal sweeps")->delimiter(',')->capture_default_str();
    sub->add_option("--b", c.b, "Fixed residual exponent")->capture_default_str();
    sub->add_option("--mu_lo", c.mu_lo)->capture_default_str();
    sub->add_option("--mu_hi", c.mu_hi)->capture_default_str();
    sub->add_flag("--synthetic", c.synthetic, "Collapse synthetic curves instead of annealing");
    sub->add_option("--synthetic_mu", c.synthetic_mu)->capture_default_str();
    sub->add_option("--semiprime", c.semiprime)->capture_default_str();
    sub->add_option("--bits", c.bits, "Factor width")->capture_default_str();
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"p-bit Ising machine emulator and sparsification experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "TOML/INI file with one [subcommand] section per experiment; flags override it");
    app.set_version_flag("--version", std::string(pbit::kVersion));
    std::size_t workers = 1;
    app.add_option("--workers", workers, "Threads for independent trials")->check(CLI::PositiveNumber);
    Output output;
    app.add_option("-o,--output", output.path, "Output file (default stdout)");

    // gen
    pbit::InstanceSpec gen_spec{16, 0.75, 1};
    auto *gen = app.add_subcommand("gen", "Write a random ER Max-Cut instance");
    gen->add_option("--n", gen_spec.n)->capture_default_str();
    gen->add_option("--edge_probability", gen_spec.edge_probability)->capture_default_str();
    gen->add_option("--seed", gen_spec.seed)->capture_default_str();

    // sparsify
    std::string sp_input;
    std::size_t sp_k = 0, sp_chain = 2;
    double sp_w0 = 1.0;
    auto *sp = app.add_subcommand("sparsify", "Copy-chain sparsify an instance file");
    sp->add_option("input", sp_input, "Instance file")->required();
    sp->add_option("--k", sp_k, "Degree bound (0: smallest for --chain_length)")->capture_default_str();
    sp->add_option("--chain_length", sp_chain)->capture_default_str();
    sp->add_option("--w0", sp_w0, "Copy-edge strength")->capture_default_str();

    // anneal
    auto anneal_cfg = pbit::experiment_defaults(pbit::ExperimentKind::maxcut_grid);
    std::string an_input;
    auto *anneal = app.add_subcommand("anneal", "Anneal an instance file, or run a Max-Cut size grid");
    bind_experiment(anneal, anneal_cfg);
    anneal->add_option("--input", an_input, "Instance file to anneal directly");

    std::map<std::string, std::pair<CLI::App *, std::unique_ptr<pbit::ExperimentConfig>>> experiments;
    auto add_experiment = [&](const std::string &name, pbit::ExperimentKind kind, const std::string &help) {
        auto cfg = std::make_unique<pbit::ExperimentConfig>(pbit::experiment_defaults(kind));
        auto *sub = app.add_subcommand(name, help);
        bind_experiment(sub, *cfg);
        experiments[name] = {sub, std::move(cfg)};
        return sub;
    };
    add_experiment("sample", pbit::ExperimentKind::boltzmann_fa, "Sparsified full-adder histograms vs Boltzmann");
    auto *w0 = add_experiment("w0-sweep", pbit::ExperimentKind::w0_sweep, "Copy-edge strength sweep");
    std::string problem = "maxcut";
    w0->add_option("--problem", problem, "maxcut or full_adder")->capture_default_str();
    add_experiment("fss", pbit::ExperimentKind::residual_fss, "Residual energy curves and scaling collapse");
    add_experiment("factor", pbit::ExperimentKind::factor, "Factor a semiprime with an invertible multiplier");
    add_experiment("cost-model", pbit::ExperimentKind::cost_model, "Sweep cost of all-to-all vs sparse networks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            gen_spec.validate();
            output.write([&](std::ostream &out) { pbit::io::write_model(out, pbit::generate_er_maxcut(gen_spec)); });
            return 0;
        }
        if (sp->parsed()) {
            auto in = open_input(sp_input);
            const auto dense = pbit::io::read_model(in);
            const auto k = sp_k != 0 ? sp_k : pbit::degree_bound_for_chain(dense.max_degree(), sp_chain);
            const auto emb = pbit::sparsify(dense, k, sp_w0);
            output.write([&](std::ostream &out) { pbit::io::write_embedding(out, emb); });
            return 0;
        }
        if (anneal->parsed()) {
            anneal_cfg.workers = workers;
            if (an_input.empty()) {
                const auto table = pbit::run_experiment(anneal_cfg);
                output.write([&](std::ostream &out) { table.write_csv(out); });
                return 0;
            }
            auto in = open_input(an_input);
            const auto model = pbit::io::read_model(in);
            anneal_cfg.validate();
            const auto schedule = anneal_cfg.schedule();
            auto results = pbit::parallel_map(anneal_cfg.trials, workers, [&](std::size_t t) {
                return pbit::simulated_anneal(model, schedule, pbit::split_seed(anneal_cfg.seed, t));
            });
            output.write([&](std::ostream &out) {
                out << "trial,best_energy,best_state,seed\n";
                for (std::size_t t = 0; t < results.size(); ++t) {
                    out << t << "," << pbit::format_real(results[t].best_energy) << ","
                        << results[t].best_state.str() << "," << anneal_cfg.seed << "\n";
                }
            });
            return 0;
        }
        for (auto &[name, entry] : experiments) {
            if (!entry.first->parsed()) {
                continue;
            }
            auto &cfg = *entry.second;
            cfg.workers = workers;
            if (name == "w0-sweep") {
                cfg.problem = pbit::parse_problem(problem);
            }
            const auto table = pbit::run_experiment(cfg);
            output.write([&](std::ostream &out) { table.write_csv(out); });
            return 0;
        }
    } catch (const pbit::config_error &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const pbit::parse_error &e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const pbit::invalid_argument &e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return 2;
    } catch (const pbit::error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
