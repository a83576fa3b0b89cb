#ifndef PBIT_EXPERIMENTS_HPP
#define PBIT_EXPERIMENTS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <type_traits>
#include <utility>
#include <vector>

#include "pbit/analysis.hpp"
#include "pbit/error.hpp"
#include "pbit/invlogic.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"
#include "pbit/rng.hpp"
#include "pbit/sampler.hpp"
#include "pbit/sparsify.hpp"

namespace pbit {

inline constexpr std::string_view kVersion = "0.1.0";

enum class ExperimentKind { boltzmann_fa, w0_sweep, maxcut_grid, residual_fss, factor, cost_model };
enum class SweepProblem { full_adder, maxcut };

inline std::string kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::boltzmann_fa:
            return "boltzmann_fa";
        case ExperimentKind::w0_sweep:
            return "w0_sweep";
        case ExperimentKind::maxcut_grid:
            return "maxcut_grid";
        case ExperimentKind::residual_fss:
            return "residual_fss";
        case ExperimentKind::factor:
            return "factor";
        case ExperimentKind::cost_model:
            return "cost_model";
    }
    return "unknown";
}

inline std::string problem_name(SweepProblem p) {
    return p == SweepProblem::full_adder ? "full_adder" : "maxcut";
}

inline SweepProblem parse_problem(std::string_view s) {
    if (s == "full_adder") {
        return SweepProblem::full_adder;
    }
    if (s == "maxcut") {
        return SweepProblem::maxcut;
    }
    throw config_error("unknown problem '" + std::string(s) + "' (expected full_adder or maxcut)");
}

/// Every knob of every experiment kind. Fields a kind does not read are ignored but
/// still enter the config hash. The defaults are the desk-scale Max-Cut settings;
/// experiment_defaults() adjusts them per kind.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::w0_sweep;
    SweepProblem problem = SweepProblem::maxcut;

    // Max-Cut instances: instance i uses generator seed instance_seed + i.
    std::size_t n = 16;
    double edge_probability = 0.75;
    std::uint64_t instance_seed = 1;
    std::size_t instances = 1;

    // Sparsification. k = 0 picks the smallest bound that yields chain_length.
    std::size_t chain_length = 2;
    std::size_t k = 0;
    std::vector<double> w0_grid{0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6, 6.5, 7, 7.5, 8};
    /// Size-dependent copy strength W0 = w0_per_k * k (maxcut_grid, residual_fss).
    double w0_per_k = 0.6;

    // Annealing.
    double beta_first = 0.125;
    double beta_last = 1.0;
    std::size_t beta_steps = 8;
    std::size_t sweeps_per_beta = 1000;
    std::size_t readout_tail = 100;
    std::size_t trials = 100;

    // Fixed-temperature sampling (full adder).
    double beta = 1.0;
    std::size_t sweeps = 1'000'000;
    std::size_t chains = 1;
    bool chromatic = false;

    // Size grids. chain_lengths lists topologies; 1 is the dense graph itself.
    std::vector<std::size_t> sizes{16, 20, 24};
    std::vector<std::size_t> sparse_sizes{12, 16, 20};
    std::vector<std::size_t> chain_lengths{1, 2};
    std::vector<std::size_t> anneal_lengths{8, 16, 32, 64, 128, 256, 512, 1024};
    double b = -0.5;
    double mu_lo = -2.0;
    double mu_hi = 8.0;
    bool synthetic = false;
    double synthetic_mu = 3.0;

    // Factoring.
    std::uint64_t semiprime = 35;
    std::size_t bits = 3;

    std::uint64_t seed = 1;
    /// Threads for independent trials; never affects results.
    std::size_t workers = 1;

    void validate() const {
        auto require = [](bool ok, const std::string &what) {
            if (!ok) {
                throw config_error(what);
            }
        };
        auto positive = [](const auto &grid) {
            for (auto v : grid) {
                if (!(v > 0)) {
                    return false;
                }
            }
            return true;
        };
        require(workers >= 1, "workers must be >= 1");
        switch (kind) {
            case ExperimentKind::boltzmann_fa:
                require(!w0_grid.empty(), "w0_grid must not be empty");
                require(positive(w0_grid), "w0_grid values must be > 0");
                require(sweeps >= 1 && chains >= 1, "sweeps and chains must be >= 1");
                require(beta >= 0.0, "beta must be >= 0");
                return;
            case ExperimentKind::w0_sweep:
                require(!w0_grid.empty(), "w0_grid must not be empty");
                require(positive(w0_grid), "w0_grid values must be > 0");
                if (problem == SweepProblem::full_adder) {
                    require(sweeps >= 1 && chains >= 1, "sweeps and chains must be >= 1");
                    return;
                }
                require(chain_length >= 1, "chain_length must be >= 1");
                break;
            case ExperimentKind::maxcut_grid:
                require(!sizes.empty(), "sizes must not be empty");
                require(!chain_lengths.empty(), "chain_lengths must not be empty");
                require(positive(chain_lengths), "chain_lengths must be >= 1");
                require(w0_per_k > 0.0, "w0_per_k must be > 0");
                break;
            case ExperimentKind::residual_fss:
                require(b == b && mu_hi > mu_lo, "need b and mu_lo < mu_hi");
                require(beta_steps >= 1, "beta_steps must be >= 1");
                require(anneal_lengths.size() >= 2, "anneal_lengths needs at least 2 entries");
                for (std::size_t i = 0; i < anneal_lengths.size(); ++i) {
                    require(anneal_lengths[i] >= beta_steps && anneal_lengths[i] % beta_steps == 0,
                            "anneal_lengths must be positive multiples of beta_steps");
                    require(i == 0 || anneal_lengths[i] > anneal_lengths[i - 1], "anneal_lengths must increase");
                }
                if (synthetic) {
                    require(sizes.size() >= 3, "synthetic collapse needs at least 3 sizes");
                    return;
                }
                require(!chain_lengths.empty() && positive(chain_lengths), "chain_lengths must be >= 1");
                for (auto len : chain_lengths) {
                    require((len == 1 ? sizes : sparse_sizes).size() >= 3,
                            "each topology needs at least 3 sizes");
                }
                require(w0_per_k > 0.0, "w0_per_k must be > 0");
                require(beta_steps == 1 || beta_last > beta_first, "beta_last must exceed beta_first");
                require(readout_tail >= 1 && trials >= 1 && instances >= 1,
                        "readout_tail, trials and instances must be >= 1");
                return;
            case ExperimentKind::factor:
                require(bits >= 2, "bits must be >= 2");
                require(2 * bits >= 64 || semiprime >> (2 * bits) == 0,
                        std::to_string(semiprime) + " does not fit a " + std::to_string(2 * bits) + "-bit product");
                break;
            case ExperimentKind::cost_model:
                require(!sizes.empty() && positive(sizes), "sizes must be nonempty and positive");
                require(k >= 3, "cost_model needs an explicit degree bound k >= 3");
                return;
        }
        require(trials >= 1, "trials must be >= 1");
        require(instances >= 1, "instances must be >= 1");
        require(n >= 2, "n must be >= 2");
        require(edge_probability > 0.0 && edge_probability <= 1.0, "edge_probability must lie in (0, 1]");
        require(beta_steps >= 1 && sweeps_per_beta >= 1, "beta_steps and sweeps_per_beta must be >= 1");
        require(beta_steps == 1 || beta_last > beta_first, "beta_last must exceed beta_first");
        require(readout_tail >= 1 && readout_tail <= sweeps_per_beta, "readout_tail must lie in [1, sweeps_per_beta]");
    }

    AnnealSchedule schedule(std::size_t per_beta) const {
        return AnnealSchedule::linear(beta_first, beta_last, beta_steps, per_beta, std::min(readout_tail, per_beta));
    }
    AnnealSchedule schedule() const {
        return schedule(sweeps_per_beta);
    }
};

/// Desk-scale defaults of one experiment kind.
inline ExperimentConfig experiment_defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    switch (kind) {
        case ExperimentKind::boltzmann_fa:
            c.problem = SweepProblem::full_adder;
            c.w0_grid = {1.0, 4.0, 7.5};
            break;
        case ExperimentKind::w0_sweep:
            break;
        case ExperimentKind::maxcut_grid:
            c.sizes = {16};
            c.chain_lengths = {1};
            break;
        case ExperimentKind::residual_fss:
            c.instances = 10;
            c.trials = 20;
            c.chain_lengths = {1, 2};
            break;
        case ExperimentKind::factor:
            c.trials = 20;
            break;
        case ExperimentKind::cost_model:
            c.sizes = {70, 80, 90, 100, 110, 120, 130};
            c.k = 51;
            break;
    }
    return c;
}

namespace detail {

template <typename T>
std::string join_list(const std::vector<T> &xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        s += (i ? "," : "");
        if constexpr (std::is_floating_point_v<T>) {
            s += format_real(xs[i]);
        } else {
            s += std::to_string(xs[i]);
        }
    }
    return s;
}

}  // namespace detail

/// key = value lines for every field except `workers`, in declaration order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig &c) {
    using detail::join_list;
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    return {
        {"kind", kind_name(c.kind)},
        {"problem", problem_name(c.problem)},
        {"n", std::to_string(c.n)},
        {"edge_probability", format_real(c.edge_probability)},
        {"instance_seed", std::to_string(c.instance_seed)},
        {"instances", std::to_string(c.instances)},
        {"chain_length", std::to_string(c.chain_length)},
        {"k", std::to_string(c.k)},
        {"w0_grid", join_list(c.w0_grid)},
        {"w0_per_k", format_real(c.w0_per_k)},
        {"beta_first", format_real(c.beta_first)},
        {"beta_last", format_real(c.beta_last)},
        {"beta_steps", std::to_string(c.beta_steps)},
        {"sweeps_per_beta", std::to_string(c.sweeps_per_beta)},
        {"readout_tail", std::to_string(c.readout_tail)},
        {"trials", std::to_string(c.trials)},
        {"beta", format_real(c.beta)},
        {"sweeps", std::to_string(c.sweeps)},
        {"chains", std::to_string(c.chains)},
        {"chromatic", b(c.chromatic)},
        {"sizes", join_list(c.sizes)},
        {"sparse_sizes", join_list(c.sparse_sizes)},
        {"chain_lengths", join_list(c.chain_lengths)},
        {"anneal_lengths", join_list(c.anneal_lengths)},
        {"b", format_real(c.b)},
        {"mu_lo", format_real(c.mu_lo)},
        {"mu_hi", format_real(c.mu_hi)},
        {"synthetic", b(c.synthetic)},
        {"synthetic_mu", format_real(c.synthetic_mu)},
        {"semiprime", std::to_string(c.semiprime)},
        {"bits", std::to_string(c.bits)},
        {"seed", std::to_string(c.seed)},
    };
}

/// FNV-1a 64 of the canonical config text, as 16 hex digits.
inline std::string config_hash(const ExperimentConfig &c) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto &[key, value] : config_entries(c)) {
        for (char ch : key + "=" + value + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ull;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Runs fn(0..count-1) on up to `workers` threads and returns the results in index
/// order. If any call throws, the exception of the lowest failing index is rethrown.
template <typename F>
auto parallel_map(std::size_t count, std::size_t workers, F fn) -> std::vector<decltype(fn(std::size_t{}))> {
    using T = decltype(fn(std::size_t{}));
    std::vector<std::optional<T>> slots(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(workers, count));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(work);
        }
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    std::vector<T> out;
    out.reserve(count);
    for (auto &s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

/// Chains split_seed over a path of child indices.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    for (auto p : path) {
        master = split_seed(master, p);
    }
    return master;
}

inline IsingModel maxcut_instance(const ExperimentConfig &c, std::size_t n, std::size_t instance) {
    return generate_er_maxcut({n, c.edge_probability, c.instance_seed + instance});
}

/// Output table: a `# meta` block, a header row and data rows. Every data row ends with
/// the run seed and config hash.
struct Table {
    std::vector<std::pair<std::string, std::string>> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void write_csv(std::ostream &out) const {
        out << "# meta\n";
        for (const auto &[key, value] : meta) {
            out << "# " << key << " = " << value << "\n";
        }
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << (i ? "," : "") << columns[i];
        }
        out << "\n";
        for (const auto &row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                out << (i ? "," : "") << row[i];
            }
            out << "\n";
        }
    }
    std::string csv() const {
        std::ostringstream s;
        write_csv(s);
        return s.str();
    }
};

namespace detail {

inline Table start_table(const ExperimentConfig &c, double reference_sweeps, double desk_sweeps,
                         std::vector<std::string> columns) {
    Table t;
    t.meta = {{"kind", kind_name(c.kind)},
              {"version", std::string(kVersion)},
              {"config_hash", config_hash(c)},
              {"seed", std::to_string(c.seed)},
              {"instance_seed", std::to_string(c.instance_seed)},
              {"desk_scale", format_real(desk_sweeps > 0 ? reference_sweeps / desk_sweeps : 1.0)}};
    for (auto &e : config_entries(c)) {
        t.meta.emplace_back("config." + e.first, e.second);
    }
    columns.push_back("seed");
    columns.push_back("config_hash");
    t.columns = std::move(columns);
    return t;
}

inline void add_row(Table &t, const ExperimentConfig &c, std::vector<std::string> cells) {
    cells.push_back(std::to_string(c.seed));
    cells.push_back(config_hash(c));
    t.rows.push_back(std::move(cells));
}

inline std::string num(double x) {
    return format_real(x);
}
inline std::string num(std::size_t x) {
    return std::to_string(x);
}

inline DecodePolicy::Kind decode_kind_for(std::size_t chain_length) {
    return chain_length > 2 ? DecodePolicy::Kind::majority_vote : DecodePolicy::Kind::coin_flip;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Full-adder sampling

struct FullAdderSample {
    double w0 = 0;
    Distribution exact;
    Distribution empirical;
    double kl = 0;
    double conflict_fraction = 0;
    std::size_t samples = 0;
};

/// Samples the k = 3 sparsified full adder at fixed beta for every W0 in the grid. All
/// chains' decoded samples are pooled into one histogram; chain c uses seed
/// split_seed(seed, c) for every W0.
inline std::vector<FullAdderSample> run_full_adder_sampling(const ExperimentConfig &c) {
    c.validate();
    const IsingModel fa = default_library().full_adder.model();
    const Distribution exact = boltzmann_exact(fa, c.beta);
    std::vector<FullAdderSample> out;
    for (double w0 : c.w0_grid) {
        const SparseEmbedding emb = sparsify(fa, 3, w0);
        struct Chain {
            std::vector<double> counts;
            double conflicts = 0;
            std::size_t samples = 0;
        };
        const std::size_t per_chain = c.sweeps / c.chains;
        auto chains = parallel_map(c.chains, c.workers, [&](std::size_t ch) {
            const std::uint64_t seed = split_seed(c.seed, ch);
            const std::size_t len = per_chain + (ch < c.sweeps % c.chains ? 1 : 0);
            Chain r;
            r.counts.assign(std::size_t{1} << emb.logical_n, 0.0);
            SpinState s(emb.physical.size());
            Stream init(seed, Purpose::init, 0);
            for (std::size_t i = 0; i < s.size(); ++i) {
                s.set(i, init.coin());
            }
            NodeStreams rng(seed, s.size());
            Decoder decoder({DecodePolicy::Kind::coin_flip, seed});
            std::optional<SweepPlan> plan;
            if (c.chromatic) {
                plan = color_graph(emb.physical);
            }
            for (std::size_t t = 0; t < len; ++t) {
                if (plan) {
                    gibbs_sweep_chromatic(emb.physical, s, c.beta, *plan, rng);
                } else {
                    gibbs_sweep_sequential(emb.physical, s, c.beta, rng);
                }
                r.counts[decoder(emb, s).bits()] += 1.0;
                r.conflicts += chain_break_fraction(emb, s);
                ++r.samples;
            }
            return r;
        });
        std::vector<double> counts(std::size_t{1} << emb.logical_n, 0.0);
        std::vector<double> conflicts;
        std::size_t samples = 0;
        for (const auto &ch : chains) {
            for (std::size_t s = 0; s < counts.size(); ++s) {
                counts[s] += ch.counts[s];
            }
            conflicts.push_back(ch.conflicts);
            samples += ch.samples;
        }
        FullAdderSample r;
        r.w0 = w0;
        r.exact = exact;
        r.empirical = Distribution::from_weights(emb.logical_n, counts);
        r.kl = kl_divergence(r.empirical, exact);
        r.conflict_fraction = pairwise_sum(conflicts) / static_cast<double>(samples);
        r.samples = samples;
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Max-Cut annealing

struct MaxCutStats {
    double success = 0;
    double success_error = 0;
    double ratio = 0;
    double ratio_error = 0;
    double mean_cut = 0;
    double chain_break = 0;
    std::size_t trials = 0;
};

namespace detail {

struct CutTrial {
    double cut = 0;
    double ratio = 0;
    double hit = 0;
    double chain_break = 0;
};

inline MaxCutStats summarize(const std::vector<CutTrial> &trials) {
    std::vector<double> hits, ratios, cuts, breaks;
    for (const auto &t : trials) {
        hits.push_back(t.hit);
        ratios.push_back(t.ratio);
        cuts.push_back(t.cut);
        breaks.push_back(t.chain_break);
    }
    const auto h = mean_stderr(hits);
    const auto r = mean_stderr(ratios);
    return {h.mean, h.std_error, r.mean, r.std_error, mean_stderr(cuts).mean, mean_stderr(breaks).mean,
            trials.size()};
}

/// One anneal of the (possibly sparsified) instance; the best physical readout is
/// decoded with the trial seed.
inline CutTrial cut_trial(const IsingModel &dense, const SparseEmbedding *emb, double optimum,
                          const AnnealSchedule &schedule, std::uint64_t seed) {
    CutTrial t;
    SpinState logical;
    if (emb == nullptr) {
        logical = simulated_anneal(dense, schedule, seed).best_state;
    } else {
        const auto r = simulated_anneal(emb->physical, schedule, seed);
        t.chain_break = chain_break_fraction(*emb, r.best_state);
        logical = decode(*emb, r.best_state, {decode_kind_for(emb->chain_length()), seed});
    }
    t.cut = cut_value(dense, logical);
    t.ratio = t.cut / optimum;
    t.hit = detail::same_cut(t.cut, optimum) ? 1.0 : 0.0;
    return t;
}

inline std::size_t bound_for(const ExperimentConfig &c, const IsingModel &dense, std::size_t chain_length) {
    return c.k != 0 ? c.k : degree_bound_for_chain(dense.max_degree(), chain_length);
}

}  // namespace detail

struct MaxCutInstance {
    IsingModel model;
    double optimum = 0;
    std::size_t optimal_states = 0;
};

inline std::vector<MaxCutInstance> maxcut_instances(const ExperimentConfig &c, std::size_t n) {
    std::vector<MaxCutInstance> out;
    for (std::size_t i = 0; i < c.instances; ++i) {
        MaxCutInstance inst{maxcut_instance(c, n, i), 0, 0};
        const auto best = brute_force_max_cut(inst.model);
        if (!(best.value > 0.0)) {
            throw infeasible_error("instance has no edges to cut");
        }
        inst.optimum = best.value;
        inst.optimal_states = best.states.size();
        out.push_back(std::move(inst));
    }
    return out;
}

struct W0Row {
    double w0 = 0;
    MaxCutStats stats;
};

/// Success probability and approximation ratio against W0 on ER(n, p) instances
/// sparsified to `chain_length`. Trial t of instance i uses the same seed for every W0.
inline std::vector<W0Row> run_maxcut_w0_sweep(const ExperimentConfig &c) {
    c.validate();
    const auto insts = maxcut_instances(c, c.n);
    const auto schedule = c.schedule();
    std::vector<W0Row> out;
    for (double w0 : c.w0_grid) {
        std::vector<SparseEmbedding> embs;
        for (const auto &inst : insts) {
            embs.push_back(sparsify(inst.model, detail::bound_for(c, inst.model, c.chain_length), w0));
        }
        auto trials = parallel_map(c.instances * c.trials, c.workers, [&](std::size_t job) {
            const std::size_t i = job / c.trials;
            const std::size_t t = job % c.trials;
            return detail::cut_trial(insts[i].model, &embs[i], insts[i].optimum, schedule,
                                     derive_seed(c.seed, {i, t}));
        });
        out.push_back({w0, detail::summarize(trials)});
    }
    return out;
}

struct GridRow {
    std::size_t n = 0;
    std::size_t chain_length = 1;
    std::size_t k = 0;  // 0 for the dense graph
    double w0 = 0;
    MaxCutStats stats;
};

/// Annealing success across sizes and topologies (chain length 1 = dense). Sparse runs
/// use W0 = w0_per_k * k.
inline std::vector<GridRow> run_maxcut_grid(const ExperimentConfig &c) {
    c.validate();
    std::vector<GridRow> out;
    const auto schedule = c.schedule();
    for (auto n : c.sizes) {
        const auto insts = maxcut_instances(c, n);
        for (auto len : c.chain_lengths) {
            std::vector<SparseEmbedding> embs;
            GridRow row{n, len, 0, 0, {}};
            if (len > 1) {
                for (const auto &inst : insts) {
                    const auto k = detail::bound_for(c, inst.model, len);
                    embs.push_back(sparsify(inst.model, k, c.w0_per_k * static_cast<double>(k)));
                }
                row.k = embs.front().k;
                row.w0 = embs.front().w0;
            }
            auto trials = parallel_map(c.instances * c.trials, c.workers, [&](std::size_t job) {
                const std::size_t i = job / c.trials;
                const std::size_t t = job % c.trials;
                return detail::cut_trial(insts[i].model, embs.empty() ? nullptr : &embs[i], insts[i].optimum,
                                         schedule, derive_seed(c.seed, {n, len, i, t}));
            });
            row.stats = detail::summarize(trials);
            out.push_back(row);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Residual energy and finite-size scaling

struct FssTopology {
    std::string name;  // "dense", "sparse<L>" or "synthetic"
    std::size_t chain_length = 1;
    std::vector<ResidualCurve> curves;
    CollapseResult collapse;
};

/// rho(N, t) = N^-b / (1 + sqrt(t N^-mu)), the scaling form with F(x) = 1 / (1 + sqrt x).
inline std::vector<ResidualCurve> synthetic_curves(const std::vector<std::size_t> &sizes,
                                                   const std::vector<std::size_t> &lengths, double mu, double b) {
    std::vector<ResidualCurve> curves;
    for (auto n : sizes) {
        ResidualCurve c{n, {}};
        const auto nn = static_cast<double>(n);
        for (auto t : lengths) {
            const double x = static_cast<double>(t) * std::pow(nn, -mu);
            c.points.push_back({static_cast<double>(t), std::pow(nn, -b) / (1.0 + std::sqrt(x)), 0.0});
        }
        curves.push_back(std::move(c));
    }
    return curves;
}

/// Residual energy curves rho(N, t) for each topology followed by a collapse at fixed b.
///
/// For each anneal length t the schedule runs t / beta_steps sweeps per beta; the
/// minimum-energy tail readout is decoded (coin flip for chains of 2, majority vote for
/// longer chains) and compared with the exact ground energy of the logical instance.
inline std::vector<FssTopology> run_residual_fss(const ExperimentConfig &c) {
    c.validate();
    CollapseOptions opts;
    opts.mu_lo = c.mu_lo;
    opts.mu_hi = c.mu_hi;
    std::vector<FssTopology> out;
    if (c.synthetic) {
        FssTopology top{"synthetic", 1, synthetic_curves(c.sizes, c.anneal_lengths, c.synthetic_mu, c.b), {}};
        top.collapse = fss_collapse(top.curves, c.b, opts);
        out.push_back(std::move(top));
        return out;
    }
    for (auto len : c.chain_lengths) {
        FssTopology top{len == 1 ? "dense" : "sparse" + std::to_string(len), len, {}, {}};
        for (auto n : len == 1 ? c.sizes : c.sparse_sizes) {
            std::vector<IsingModel> models;
            std::vector<double> ground;
            std::vector<SparseEmbedding> embs;
            for (std::size_t i = 0; i < c.instances; ++i) {
                models.push_back(maxcut_instance(c, n, i));
                ground.push_back(brute_force_ground(models.back()).value);
                if (len > 1) {
                    const auto k = detail::bound_for(c, models.back(), len);
                    embs.push_back(sparsify(models.back(), k, c.w0_per_k * static_cast<double>(k)));
                }
            }
            ResidualCurve curve{n, {}};
            for (auto t : c.anneal_lengths) {
                const auto schedule = c.schedule(t / c.beta_steps);
                auto gaps = parallel_map(c.instances * c.trials, c.workers, [&](std::size_t job) {
                    const std::size_t i = job / c.trials;
                    const std::uint64_t seed = derive_seed(c.seed, {len, n, t, i, job % c.trials});
                    SpinState logical;
                    if (len == 1) {
                        logical = simulated_anneal(models[i], schedule, seed).best_state;
                    } else {
                        const auto r = simulated_anneal(embs[i].physical, schedule, seed);
                        logical = decode(embs[i], r.best_state, {detail::decode_kind_for(len), seed});
                    }
                    return (energy(models[i], logical) - ground[i]) / static_cast<double>(n);
                });
                const auto ms = mean_stderr(gaps);
                curve.points.push_back({static_cast<double>(t), ms.mean, ms.std_error});
            }
            top.curves.push_back(std::move(curve));
        }
        top.collapse = fss_collapse(top.curves, c.b, opts);
        out.push_back(std::move(top));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Factoring

struct FactorTrial {
    std::uint64_t p = 0;
    std::uint64_t q = 0;
    double energy = 0;
    bool success = false;
};

struct FactorReport {
    std::vector<FactorTrial> trials;
    double success_rate = 0;
    NetStats stats;
    std::size_t dense_pbits = 0;
};

/// Anneals the F-clamped multiplier and reads p and q; a trial succeeds only if the
/// product p * q reproduces the semiprime.
inline FactorReport run_factor(const ExperimentConfig &c) {
    c.validate();
    const CircuitNet base = build_multiplier(c.bits);
    const CircuitNet net = clamp_output(base, c.semiprime);
    const ReducedNet red = reduce(net);
    const auto schedule = c.schedule();
    FactorReport rep;
    rep.trials = parallel_map(c.trials, c.workers, [&](std::size_t t) {
        const auto r = simulated_anneal(red.model, schedule, split_seed(c.seed, t));
        const SpinState full = red.extend(r.best_state);
        FactorTrial ft;
        ft.p = port_value(full, net.p);
        ft.q = port_value(full, net.q);
        ft.energy = r.best_energy + red.offset;
        ft.success = ft.p * ft.q == c.semiprime;
        return ft;
    });
    std::size_t ok = 0;
    for (const auto &t : rep.trials) {
        ok += t.success ? 1 : 0;
    }
    rep.success_rate = static_cast<double>(ok) / static_cast<double>(rep.trials.size());
    rep.stats = net_stats(base);
    rep.dense_pbits = pbit_count(c.bits, Formulation::dense);
    return rep;
}

// ---------------------------------------------------------------------------
// Sweep cost

struct CostRow {
    std::size_t n = 0;
    Topology topology = Topology::all_to_all;
    std::size_t chain_length = 1;
    std::size_t physical_nodes = 0;
    SweepCost cost;
};

/// Cycles per sweep and relative sweep rate of the complete graph K_N, both as an
/// all-to-all network and sparsified with degree bound k and colored greedily.
/// Relative rates are normalized to the first size.
inline std::vector<CostRow> run_cost_model(const ExperimentConfig &c) {
    c.validate();
    std::vector<CostRow> out;
    const auto ref = static_cast<double>(c.sizes.front());
    for (auto n : c.sizes) {
        std::vector<Coupling> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                edges.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), -1.0});
            }
        }
        const IsingModel dense(n, std::move(edges));
        out.push_back({n, Topology::all_to_all, 1, n, sweep_cost(dense, color_graph(dense), Topology::all_to_all, ref)});
        const auto emb = sparsify(dense, c.k, 1.0);
        const auto plan = color_graph(emb.physical);
        out.push_back({n, Topology::sparse, emb.chain_length(), emb.physical.size(),
                       sweep_cost(emb.physical, plan, Topology::sparse, ref)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Tables

inline Table full_adder_table(const ExperimentConfig &c, const std::vector<FullAdderSample> &rows,
                              bool distributions) {
    using detail::num;
    Table t = detail::start_table(c, 1e7, static_cast<double>(c.sweeps),
                                  distributions ? std::vector<std::string>{"w0", "state", "p_exact", "p_empirical"}
                                                : std::vector<std::string>{"w0", "kl", "conflict_fraction",
                                                                           "samples"});
    for (const auto &r : rows) {
        if (!distributions) {
            detail::add_row(t, c, {num(r.w0), num(r.kl), num(r.conflict_fraction), num(r.samples)});
            continue;
        }
        for (std::size_t s = 0; s < r.exact.size(); ++s) {
            detail::add_row(t, c,
                            {num(r.w0), SpinState::from_bits(r.exact.spins(), s).str(), num(r.exact[s]),
                             num(r.empirical[s])});
        }
    }
    return t;
}

inline Table w0_table(const ExperimentConfig &c, const std::vector<W0Row> &rows) {
    using detail::num;
    Table t = detail::start_table(
        c, 8e5, static_cast<double>(c.schedule().total_sweeps()),
        {"w0", "success_probability", "success_std_error", "approximation_ratio", "ratio_std_error",
         "chain_break_fraction", "trials"});
    for (const auto &r : rows) {
        detail::add_row(t, c,
                        {num(r.w0), num(r.stats.success), num(r.stats.success_error), num(r.stats.ratio),
                         num(r.stats.ratio_error), num(r.stats.chain_break), num(r.stats.trials)});
    }
    return t;
}

inline Table grid_table(const ExperimentConfig &c, const std::vector<GridRow> &rows) {
    using detail::num;
    Table t = detail::start_table(c, 8e5, static_cast<double>(c.schedule().total_sweeps()),
                                  {"n", "chain_length", "k", "w0", "success_probability", "success_std_error",
                                   "approximation_ratio", "ratio_std_error", "mean_cut", "trials"});
    for (const auto &r : rows) {
        detail::add_row(t, c,
                        {num(r.n), num(r.chain_length), num(r.k), num(r.w0), num(r.stats.success),
                         num(r.stats.success_error), num(r.stats.ratio), num(r.stats.ratio_error),
                         num(r.stats.mean_cut), num(r.stats.trials)});
    }
    return t;
}

inline Table fss_table(const ExperimentConfig &c, const std::vector<FssTopology> &tops) {
    using detail::num;
    Table t = detail::start_table(c, 1e4, static_cast<double>(c.anneal_lengths.back()),
                                  {"record", "topology", "n", "t", "rho", "std_error", "b", "mu", "quality"});
    for (const auto &top : tops) {
        for (const auto &curve : top.curves) {
            for (const auto &p : curve.points) {
                detail::add_row(t, c,
                                {"point", top.name, num(curve.n), num(p.t), num(p.rho), num(p.std_error), "", "",
                                 ""});
            }
        }
        detail::add_row(t, c,
                        {"collapse", top.name, "", "", "", "", num(top.collapse.b), num(top.collapse.mu),
                         num(top.collapse.quality)});
    }
    return t;
}

inline Table factor_table(const ExperimentConfig &c, const FactorReport &rep) {
    using detail::num;
    Table t = detail::start_table(c, 1, 1, {"record", "trial", "p", "q", "product", "energy", "success"});
    for (std::size_t i = 0; i < rep.trials.size(); ++i) {
        const auto &tr = rep.trials[i];
        detail::add_row(t, c,
                        {"trial", num(i), std::to_string(tr.p), std::to_string(tr.q), std::to_string(tr.p * tr.q),
                         num(tr.energy), tr.success ? "1" : "0"});
    }
    t.meta.emplace_back("success_rate", num(rep.success_rate));
    t.meta.emplace_back("pbits", num(rep.stats.spins));
    t.meta.emplace_back("dense_pbits", num(rep.dense_pbits));
    t.meta.emplace_back("edges", num(rep.stats.edges));
    t.meta.emplace_back("density", num(rep.stats.density));
    t.meta.emplace_back("distinct_abs_couplings", num(rep.stats.abs_couplings.size()));
    t.meta.emplace_back("max_abs_coupling",
                        num(rep.stats.abs_couplings.empty() ? 0.0 : *rep.stats.abs_couplings.rbegin()));
    t.meta.emplace_back("distinct_abs_biases", num(rep.stats.abs_biases.size()));
    return t;
}

inline Table cost_table(const ExperimentConfig &c, const std::vector<CostRow> &rows) {
    using detail::num;
    Table t = detail::start_table(c, 1, 1,
                                  {"n", "topology", "chain_length", "physical_nodes", "cycles_per_mcs",
                                   "relative_frequency"});
    for (const auto &r : rows) {
        detail::add_row(t, c,
                        {num(r.n), r.topology == Topology::all_to_all ? "all_to_all" : "sparse",
                         num(r.chain_length), num(r.physical_nodes), num(r.cost.cycles_per_mcs),
                         num(r.cost.relative_frequency)});
    }
    return t;
}

/// Validates and runs any experiment kind.
inline Table run_experiment(const ExperimentConfig &c) {
    c.validate();
    switch (c.kind) {
        case ExperimentKind::boltzmann_fa:
            return full_adder_table(c, run_full_adder_sampling(c), true);
        case ExperimentKind::w0_sweep:
            if (c.problem == SweepProblem::full_adder) {
                return full_adder_table(c, run_full_adder_sampling(c), false);
            }
            return w0_table(c, run_maxcut_w0_sweep(c));
        case ExperimentKind::maxcut_grid:
            return grid_table(c, run_maxcut_grid(c));
        case ExperimentKind::residual_fss:
            return fss_table(c, run_residual_fss(c));
        case ExperimentKind::factor:
            return factor_table(c, run_factor(c));
        case ExperimentKind::cost_model:
            return cost_table(c, run_cost_model(c));
    }
    throw config_error("unknown experiment kind");
}

}  // namespace pbit

#endif  // PBIT_EXPERIMENTS_HPP
