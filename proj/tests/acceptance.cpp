// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance            run all criteria
//   acceptance --only 3   run a single criterion

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>

#include "oracles.hpp"
#include "pbit/pbit.hpp"

using namespace pbit;

namespace {

struct Outcome {
    bool pass = false;
    std::string details;
};

ExperimentConfig defaults(ExperimentKind kind) {
    auto c = experiment_defaults(kind);
    c.workers = std::max(1u, std::thread::hardware_concurrency());
    return c;
}

std::string fmt(const char *f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome oracle_equivalence() {
    std::size_t bad_ground = 0, bad_offset = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const std::size_t n = 6 + i % 7;
        const auto g = generate_er_maxcut({n, 0.75, 500 + i});
        const double w0 = 1.0 + g.abs_weight_sum();
        const auto emb = sparsify(g, degree_bound_for_chain(g.max_degree(), 2), w0);
        const auto dense = oracle::ground(g);
        const auto phys = brute_force_ground(emb.physical);
        for (const auto &s : phys.states) {
            if (oracle::energy(g, decode(emb, s, {}).bits()) != dense.value) {
                ++bad_ground;
            }
        }
        const double offset = w0 * static_cast<double>(emb.copy_edge_count());
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
            const double lhs = energy(emb.physical, embed_state(emb, SpinState::from_bits(n, b)));
            if (std::abs(lhs - (oracle::energy(g, b) - offset)) > 1e-9) {
                ++bad_offset;
            }
        }
    }
    return {bad_ground == 0 && bad_offset == 0,
            fmt("20 instances, %zu ground mismatches, %zu offset mismatches", bad_ground, bad_offset)};
}

Outcome boltzmann_fidelity() {
    const auto c = defaults(ExperimentKind::boltzmann_fa);
    const auto rows = run_full_adder_sampling(c);
    const double kl1 = rows[0].kl, kl4 = rows[1].kl, kl75 = rows[2].kl;
    // the exact reference is recomputed from the oracle, not taken from the run
    const auto exact = oracle::boltzmann(default_library().full_adder.model(), c.beta);
    double kl4_oracle = 0;
    for (std::size_t s = 0; s < exact.size(); ++s) {
        const double p = rows[1].empirical[s];
        if (p > 0) {
            kl4_oracle += p * std::log(p / exact[s]);
        }
    }
    const bool ok = kl4 < kl1 && kl4 < kl75 && kl4 < 0.05 && std::abs(kl4_oracle - kl4) < 1e-9;
    return {ok, fmt("KL(W0=1) = %.4g, KL(W0=4) = %.4g, KL(W0=7.5) = %.4g nats, oracle KL(W0=4) = %.4g", kl1, kl4,
                    kl75, kl4_oracle)};
}

Outcome w0_phenomenology() {
    const auto c = defaults(ExperimentKind::w0_sweep);
    const auto rows = run_maxcut_w0_sweep(c);
    std::vector<double> w0, success, ratio;
    for (const auto &r : rows) {
        w0.push_back(r.w0);
        success.push_back(r.stats.success);
        ratio.push_back(r.stats.ratio);
    }
    const auto peak = find_peak(w0, success);
    const auto band = longest_interval_at_least(w0, ratio, 0.9);
    const bool ok = peak.interior && band.width() >= 4.0 * peak.fwhm;
    return {ok, fmt("success peak %.2f at W0 = %.2f (%s), FWHM %.3f; ratio >= 0.9 on [%.3f, %.3f], width %.3f "
                    "vs required %.3f",
                    peak.value, peak.x, peak.interior ? "interior" : "endpoint", peak.fwhm, band.lo, band.hi,
                    band.width(), 4.0 * peak.fwhm)};
}

Outcome dense_baseline() {
    const auto c = defaults(ExperimentKind::maxcut_grid);
    const auto rows = run_maxcut_grid(c);
    const auto &s = rows.front().stats;
    return {s.success >= 0.9, fmt("dense ER(16, 0.75): optimum reached in %.0f of %zu trials", s.success * 100.0,
                                  s.trials)};
}

// rho = N^{1/2} (1 + t N^-mu)^{-1/3}: a scaling form unrelated to the library's synthetic one
std::vector<ResidualCurve> oracle_curves(double mu) {
    std::vector<ResidualCurve> curves;
    for (std::size_t n : {16u, 24u, 32u, 48u, 64u}) {
        ResidualCurve c{n, {}};
        const auto nn = static_cast<double>(n);
        for (double t = 8; t <= 1 << 24; t *= 2) {
            c.points.push_back({t, std::sqrt(nn) * std::pow(1.0 + t * std::pow(nn, -mu), -1.0 / 3.0), 0.0});
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

Outcome fss_machinery() {
    const auto c = defaults(ExperimentKind::residual_fss);
    CollapseOptions opts;
    opts.mu_lo = c.mu_lo;
    opts.mu_hi = c.mu_hi;
    const double mu_synth = fss_collapse(oracle_curves(3.0), -0.5, opts).mu;
    const auto tops = run_residual_fss(c);
    double mu_dense = NAN, mu_sparse = NAN;
    for (const auto &t : tops) {
        (t.chain_length == 1 ? mu_dense : mu_sparse) = t.collapse.mu;
    }
    const bool ok = std::abs(mu_synth - 3.0) <= 0.1 && mu_sparse - mu_dense > 1.0;
    return {ok, fmt("synthetic mu = %.4f; mu_dense = %.3f, mu_sparse = %.3f, separation %.3f", mu_synth, mu_dense,
                    mu_sparse, mu_sparse - mu_dense)};
}

Outcome cost_model() {
    const auto c = defaults(ExperimentKind::cost_model);
    const auto rows = run_cost_model(c);
    bool linear = true;
    std::set<std::size_t> sparse_cycles;
    for (const auto &r : rows) {
        if (r.topology == Topology::all_to_all) {
            linear = linear && r.cost.cycles_per_mcs == r.n;
        } else {
            sparse_cycles.insert(r.cost.cycles_per_mcs);
        }
    }
    const auto a = sweep_cost(IsingModel(70), SweepPlan(), Topology::all_to_all, 70.0);
    const auto b = sweep_cost(IsingModel(140), SweepPlan(), Topology::all_to_all, 70.0);
    const double ratio = b.relative_frequency / a.relative_frequency;
    const bool ok = linear && sparse_cycles.size() == 1 && ratio == 0.25;
    return {ok, fmt("all-to-all cycles = N: %s; sparse k = 51 cycles: %zu distinct (%zu); f(140)/f(70) = %.17g",
                    linear ? "yes" : "no", sparse_cycles.size(), sparse_cycles.empty() ? 0 : *sparse_cycles.begin(),
                    ratio)};
}

Outcome invertible_logic() {
    std::vector<std::string> problems;
    for (auto kind : {GateKind::and_gate, GateKind::full_adder}) {
        const auto &e = default_library()[kind];
        const auto gs = oracle::ground(e.model());
        std::set<std::uint64_t> want;
        for (const auto &row : truth_table(kind)) {
            want.insert(row.bits());
        }
        if (std::set<std::uint64_t>(gs.states.begin(), gs.states.end()) != want ||
            gs.states.size() != (kind == GateKind::and_gate ? 4u : 8u)) {
            problems.push_back(gate_name(kind) + " ground set");
        }
    }
    {
        MultiplierOptions opts;
        opts.odd_factors = false;
        const auto net = build_multiplier(2, default_library(), opts);
        const auto red = reduce(net);
        const auto gs = brute_force_ground(red.model);
        std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> got, want;
        for (const auto &s : gs.states) {
            const auto full = red.extend(s);
            got.insert({port_value(full, net.p), port_value(full, net.q), port_value(full, net.f)});
        }
        for (std::uint64_t p = 0; p < 4; ++p) {
            for (std::uint64_t q = 0; q < 4; ++q) {
                want.insert({p, q, p * q});
            }
        }
        if (got != want || gs.states.size() != want.size()) {
            problems.push_back("n = 2 ground set");
        }
    }
    const auto rep = run_factor(defaults(ExperimentKind::factor));
    std::size_t verified = 0;
    for (const auto &t : rep.trials) {
        verified += t.p * t.q == 35 && t.p > 1 && t.q > 1 ? 1 : 0;
    }
    if (2 * verified <= rep.trials.size()) {
        problems.push_back("factoring rate");
    }
    std::size_t worst_distinct = 0;
    double worst_max = 0;
    for (std::size_t n = 2; n <= 10; ++n) {
        const auto st = net_stats(build_multiplier(n));
        worst_distinct = std::max(worst_distinct, st.abs_couplings.size());
        worst_max = std::max(worst_max, *st.abs_couplings.rbegin());
    }
    if (worst_distinct > 4 || worst_max > 7) {
        problems.push_back("weight set");
    }
    std::string failed;
    for (const auto &p : problems) {
        failed += (failed.empty() ? "" : ", ") + p;
    }
    return {problems.empty(),
            fmt("gates exact; F = 35 factored in %zu of %zu trials; at most %zu distinct |J|, max |J| = %g%s", verified,
                rep.trials.size(), worst_distinct, worst_max, failed.empty() ? "" : ("; failed: " + failed).c_str())};
}

Outcome determinism() {
    std::vector<ExperimentConfig> configs;
    {
        auto c = experiment_defaults(ExperimentKind::boltzmann_fa);
        c.sweeps = 50000;
        c.chains = 4;
        configs.push_back(c);
    }
    {
        auto c = experiment_defaults(ExperimentKind::w0_sweep);
        c.w0_grid = {2, 4.5, 7};
        c.trials = 20;
        c.sweeps_per_beta = 200;
        configs.push_back(c);
    }
    {
        auto c = experiment_defaults(ExperimentKind::maxcut_grid);
        c.sizes = {12, 16};
        c.chain_lengths = {1, 2, 3};
        c.trials = 20;
        c.sweeps_per_beta = 200;
        configs.push_back(c);
    }
    {
        auto c = experiment_defaults(ExperimentKind::residual_fss);
        c.sizes = {8, 10, 12};
        c.sparse_sizes = {8, 10, 12};
        c.anneal_lengths = {8, 16, 32, 64, 128};
        c.instances = 3;
        c.trials = 5;
        configs.push_back(c);
    }
    configs.push_back(experiment_defaults(ExperimentKind::factor));
    configs.push_back(experiment_defaults(ExperimentKind::cost_model));
    std::size_t identical = 0;
    std::string differing;
    for (auto c : configs) {
        c.workers = 1;
        const auto first = run_experiment(c).csv();
        const auto again = run_experiment(c).csv();
        c.workers = 4;
        const auto parallel = run_experiment(c).csv();
        if (first == again && first == parallel) {
            ++identical;
        } else {
            differing += " " + kind_name(c.kind);
        }
    }
    return {identical == configs.size(),
            fmt("%zu of %zu experiment kinds byte-identical across reruns and 1 vs 4 workers%s", identical,
                configs.size(), differing.empty() ? "" : ("; differ:" + differing).c_str())};
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    int only = 0;
    app.add_option("--only", only, "run a single criterion (1-8)")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Outcome()>> criteria{oracle_equivalence, boltzmann_fidelity, w0_phenomenology,
                                                         dense_baseline,     fss_machinery,      cost_model,
                                                         invertible_logic,   determinism};
    int failures = 0;
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) {
        if (only != 0 && only != i) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i - 1]();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %d: %s (%s) [%.1f s]\n", i, o.pass ? "PASS" : "FAIL", o.details.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
