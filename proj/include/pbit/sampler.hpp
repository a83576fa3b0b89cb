#ifndef PBIT_SAMPLER_HPP
#define PBIT_SAMPLER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"
#include "pbit/rng.hpp"

namespace pbit {

/// Partition of the nodes into color classes, updated in class order. Nodes of one
/// class share no edge, so a class can be updated in a single parallel step.
class SweepPlan {
   public:
    SweepPlan() = default;

    /// Throws contract_violation unless `classes` partitions 0..n-1.
    SweepPlan(std::size_t n, std::vector<std::vector<NodeIndex>> classes)
        : classes_(std::move(classes)), color_of_(n, kUnassigned) {
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            for (auto v : classes_[c]) {
                if (v >= n || color_of_[v] != kUnassigned) {
                    throw contract_violation("color classes must partition the nodes");
                }
                color_of_[v] = static_cast<std::uint32_t>(c);
            }
        }
        if (std::find(color_of_.begin(), color_of_.end(), kUnassigned) != color_of_.end()) {
            throw contract_violation("color classes do not cover every node");
        }
    }

    const std::vector<std::vector<NodeIndex>> &classes() const noexcept {
        return classes_;
    }
    std::size_t class_count() const noexcept {
        return classes_.size();
    }
    std::size_t size() const noexcept {
        return color_of_.size();
    }
    std::uint32_t color_of(std::size_t node) const noexcept {
        return color_of_[node];
    }

    bool is_proper_for(const IsingModel &model) const {
        if (model.size() != size()) {
            return false;
        }
        for (const auto &e : model.edges()) {
            if (color_of_[e.i] == color_of_[e.j]) {
                return false;
            }
        }
        return true;
    }

   private:
    static constexpr std::uint32_t kUnassigned = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::vector<NodeIndex>> classes_;
    std::vector<std::uint32_t> color_of_;
};

/// Largest-degree-first greedy coloring (ties by node index). Uses at most
/// max_degree + 1 colors.
inline SweepPlan color_graph(const IsingModel &model) {
    const std::size_t n = model.size();
    std::vector<NodeIndex> order(n);
    std::iota(order.begin(), order.end(), NodeIndex{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeIndex a, NodeIndex b) { return model.degree(a) > model.degree(b); });
    constexpr std::uint32_t none = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> color(n, none);
    std::vector<char> taken;
    std::uint32_t used = 0;
    for (auto v : order) {
        taken.assign(model.degree(v) + 1, 0);
        for (const auto &nb : model.neighbors(v)) {
            if (color[nb.index] != none && color[nb.index] < taken.size()) {
                taken[color[nb.index]] = 1;
            }
        }
        std::uint32_t c = 0;
        while (taken[c]) {
            ++c;
        }
        color[v] = c;
        used = std::max(used, c + 1);
    }
    std::vector<std::vector<NodeIndex>> classes(used);
    for (std::size_t v = 0; v < n; ++v) {
        classes[color[v]].push_back(static_cast<NodeIndex>(v));
    }
    return SweepPlan(n, std::move(classes));
}

/// I_i = sum_j J_ij m_j + h_i.
inline double local_field(const IsingModel &model, const SpinState &state, std::size_t i) {
    detail::require_same_size(model, state);
    if (i >= model.size()) {
        throw dimension_error("node " + std::to_string(i) + " outside model of size " +
                              std::to_string(model.size()));
    }
    double f = model.biases()[i];
    for (const auto &nb : model.neighbors(i)) {
        f += nb.weight * state[nb.index];
    }
    return f;
}

namespace detail {

/// m_i <- +1 with probability (1 + tanh(beta I_i)) / 2, one uniform from node i's stream.
inline void update_node(const IsingModel &model, SpinState &state, double beta, std::size_t i,
                        Stream &stream) {
    double f = model.biases()[i];
    for (const auto &nb : model.neighbors(i)) {
        f += nb.weight * state[nb.index];
    }
    const double p_up = 0.5 * (1.0 + std::tanh(beta * f));
    state.set(i, stream.uniform() < p_up ? +1 : -1);
}

inline void require_streams(const IsingModel &model, const NodeStreams &rng) {
    if (rng.size() != model.size()) {
        throw dimension_error("need one random stream per node");
    }
}

}  // namespace detail

/// One Monte Carlo sweep visiting nodes 0..n-1 in order, each seeing the partially
/// updated state.
inline void gibbs_sweep_sequential(const IsingModel &model, SpinState &state, double beta, NodeStreams &rng) {
    detail::require_same_size(model, state);
    detail::require_streams(model, rng);
    for (std::size_t i = 0; i < model.size(); ++i) {
        detail::update_node(model, state, beta, i, rng[i]);
    }
}

/// One sweep updating the color classes of `plan` in order. Within a class every node
/// reads only nodes of other classes and draws only from its own stream, so the result
/// does not depend on the order of nodes inside a class. Throws contract_violation if a
/// class contains an edge.
inline void gibbs_sweep_chromatic(const IsingModel &model, SpinState &state, double beta, const SweepPlan &plan,
                                  NodeStreams &rng) {
    detail::require_same_size(model, state);
    detail::require_streams(model, rng);
    if (plan.size() != model.size()) {
        throw contract_violation("sweep plan built for a different model size");
    }
    for (std::size_t c = 0; c < plan.class_count(); ++c) {
        for (auto v : plan.classes()[c]) {
            for (const auto &nb : model.neighbors(v)) {
                if (plan.color_of(nb.index) == c) {
                    throw contract_violation("nodes " + std::to_string(v) + " and " + std::to_string(nb.index) +
                                             " share an edge and a color class");
                }
            }
            detail::update_node(model, state, beta, v, rng[v]);
        }
    }
}

/// Signed fixed-point format for beta-scaled weights: 1 sign bit, 6 integer bits and
/// 3 fraction bits by default.
struct FixedPointSpec {
    int integer_bits = 6;
    int fraction_bits = 3;

    double step() const {
        return std::ldexp(1.0, -fraction_bits);
    }
    double max_value() const {
        return std::ldexp(1.0, integer_bits) - step();
    }
};

/// Nearest grid value, ties away from zero, clamped to the representable range.
/// Increments `clamped` when clamping happens.
inline double quantize(double x, const FixedPointSpec &spec, std::size_t &clamped) {
    const double q = std::round(x / spec.step()) * spec.step();
    const double lim = spec.max_value();
    if (q > lim || q < -lim) {
        ++clamped;
        return q > 0 ? lim : -lim;
    }
    return q;
}

inline double quantize(double x, const FixedPointSpec &spec = {}) {
    std::size_t ignored = 0;
    return quantize(x, spec, ignored);
}

/// beta-scaled, quantized copy of a model; sample it at beta = 1.
struct QuantizedWeights {
    IsingModel model;
    std::size_t clamped = 0;
};

inline QuantizedWeights quantize_weights(const IsingModel &model, double beta, const FixedPointSpec &spec = {}) {
    QuantizedWeights out;
    std::vector<Coupling> couplings;
    couplings.reserve(model.edge_count());
    for (const auto &e : model.edges()) {
        couplings.push_back({e.i, e.j, quantize(beta * e.weight, spec, out.clamped)});
    }
    std::vector<double> biases(model.size());
    for (std::size_t i = 0; i < model.size(); ++i) {
        biases[i] = quantize(beta * model.biases()[i], spec, out.clamped);
    }
    out.model = IsingModel(model.size(), std::move(couplings), std::move(biases));
    return out;
}

struct AnnealSchedule {
    std::vector<double> betas;
    std::size_t sweeps_per_beta = 1;
    /// Final sweeps at the last beta whose states are kept as readouts.
    std::size_t readout_tail = 1;

    /// `steps` betas evenly spaced from `first` to `last` inclusive.
    static AnnealSchedule linear(double first, double last, std::size_t steps, std::size_t sweeps_per_beta,
                                 std::size_t readout_tail) {
        AnnealSchedule s;
        s.sweeps_per_beta = sweeps_per_beta;
        s.readout_tail = readout_tail;
        for (std::size_t t = 0; t < steps; ++t) {
            s.betas.push_back(steps == 1 ? last
                                         : first + (last - first) * static_cast<double>(t) /
                                                       static_cast<double>(steps - 1));
        }
        return s;
    }

    std::size_t total_sweeps() const {
        return betas.size() * sweeps_per_beta;
    }

    void validate() const {
        if (betas.empty()) {
            throw invalid_argument("anneal schedule needs at least one beta");
        }
        for (std::size_t t = 1; t < betas.size(); ++t) {
            if (!(betas[t] > betas[t - 1])) {
                throw invalid_argument("anneal betas must be strictly increasing");
            }
        }
        if (sweeps_per_beta < 1) {
            throw invalid_argument("sweeps_per_beta must be >= 1");
        }
        if (readout_tail > sweeps_per_beta) {
            throw invalid_argument("readout_tail cannot exceed sweeps_per_beta");
        }
    }
};

struct AnnealResult {
    SpinState best_state;
    double best_energy = std::numeric_limits<double>::infinity();
    std::vector<SpinState> tail;
};

/// Called after every sweep with the 1-based sweep count, the beta, and the state.
using SweepObserver = std::function<void(std::size_t sweep, double beta, const SpinState &state)>;

struct AnnealOptions {
    /// Chromatic sweeps with this plan; sequential sweeps when empty.
    std::optional<SweepPlan> plan;
    /// Hardware-faithful mode: beta*J and beta*h rounded to this fixed-point grid.
    std::optional<FixedPointSpec> quantization;
    SweepObserver observer;
};

/// Simulated annealing from a uniformly random state (Stream(seed, init)), running
/// `sweeps_per_beta` sweeps at each beta. The last `readout_tail` states at the final
/// beta are recorded; the best readout is the one with minimum energy under `model`.
inline AnnealResult simulated_anneal(const IsingModel &model, const AnnealSchedule &schedule, std::uint64_t seed,
                                     const AnnealOptions &options = {}) {
    schedule.validate();
    if (options.plan && !options.plan->is_proper_for(model)) {
        throw contract_violation("sweep plan is not a proper coloring of the model");
    }
    const std::size_t n = model.size();
    SpinState state(n);
    Stream init(seed, Purpose::init, 0);
    for (std::size_t i = 0; i < n; ++i) {
        state.set(i, init.coin());
    }
    NodeStreams rng(seed, n, Purpose::sweep);

    AnnealResult result;
    std::size_t sweep = 0;
    for (std::size_t b = 0; b < schedule.betas.size(); ++b) {
        const double beta = schedule.betas[b];
        std::optional<QuantizedWeights> q;
        if (options.quantization) {
            q = quantize_weights(model, beta, *options.quantization);
        }
        const IsingModel &active = q ? q->model : model;
        const double active_beta = q ? 1.0 : beta;
        const bool last = b + 1 == schedule.betas.size();
        for (std::size_t s = 0; s < schedule.sweeps_per_beta; ++s) {
            if (options.plan) {
                gibbs_sweep_chromatic(active, state, active_beta, *options.plan, rng);
            } else {
                gibbs_sweep_sequential(active, state, active_beta, rng);
            }
            ++sweep;
            if (options.observer) {
                options.observer(sweep, beta, state);
            }
            if (last && s + schedule.readout_tail >= schedule.sweeps_per_beta) {
                result.tail.push_back(state);
                const double e = energy(model, state);
                if (e < result.best_energy) {
                    result.best_energy = e;
                    result.best_state = state;
                }
            }
        }
    }
    return result;
}

/// CSV trajectory dump: sweep,beta,energy,state.
inline SweepObserver trajectory_writer(std::ostream &out, const IsingModel &model) {
    out << "sweep,beta,energy,state\n";
    return [&out, &model](std::size_t sweep, double beta, const SpinState &s) {
        out << sweep << "," << format_real(beta) << "," << format_real(energy(model, s)) << "," << s.str() << "\n";
    };
}

enum class Topology { all_to_all, sparse };

struct SweepCost {
    std::size_t cycles_per_mcs = 0;
    double relative_frequency = 0;
};

/// Clock cycles per Monte Carlo sweep and relative sweep frequency.
///
/// All-to-all: nodes update one per cycle and each adder has delay proportional to N
/// (1 at `reference_size`), so the sweep rate is (reference_size / N)^2. Sparse: one
/// cycle per color class and a size-independent rate of 1.
inline SweepCost sweep_cost(const IsingModel &model, const SweepPlan &plan, Topology topology,
                            double reference_size = 1.0) {
    if (topology == Topology::all_to_all) {
        const auto n = static_cast<double>(model.size());
        return {model.size(), n > 0 ? (reference_size / n) * (reference_size / n) : 0.0};
    }
    if (plan.size() != model.size()) {
        throw contract_violation("sweep plan built for a different model size");
    }
    return {plan.class_count(), 1.0};
}

}  // namespace pbit

#endif  // PBIT_SAMPLER_HPP
