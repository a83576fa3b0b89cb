#ifndef PBIT_ISING_HPP
#define PBIT_ISING_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/rng.hpp"

namespace pbit {

using NodeIndex = std::uint32_t;

/// Undirected coupling in canonical form (i < j).
struct Coupling {
    NodeIndex i;
    NodeIndex j;
    double weight;

    friend bool operator==(const Coupling &, const Coupling &) = default;
};

struct Neighbor {
    NodeIndex index;
    double weight;
};

/// Vector of +1/-1 spins, node 0 first.
class SpinState {
   public:
    SpinState() = default;
    explicit SpinState(std::size_t n, std::int8_t value = +1) : spins_(n, value) {
        check_value(value);
    }
    explicit SpinState(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
        for (auto s : spins_) {
            check_value(s);
        }
    }

    /// Bit i of `bits` set means spin i is +1.
    static SpinState from_bits(std::size_t n, std::uint64_t bits) {
        SpinState s(n, -1);
        for (std::size_t i = 0; i < n; ++i) {
            if ((bits >> i) & 1u) {
                s.spins_[i] = +1;
            }
        }
        return s;
    }

    /// Parses the `+`/`-` text form.
    static SpinState parse(std::string_view text) {
        std::vector<std::int8_t> spins;
        spins.reserve(text.size());
        for (char c : text) {
            if (c == '+') {
                spins.push_back(+1);
            } else if (c == '-') {
                spins.push_back(-1);
            } else {
                throw invalid_argument(std::string("bad spin character '") + c + "'");
            }
        }
        return SpinState(std::move(spins));
    }

    std::string str() const {
        std::string out(spins_.size(), '+');
        for (std::size_t i = 0; i < spins_.size(); ++i) {
            if (spins_[i] < 0) {
                out[i] = '-';
            }
        }
        return out;
    }

    std::uint64_t bits() const {
        if (spins_.size() > 64) {
            throw capacity_error("state too large for a 64-bit index");
        }
        std::uint64_t b = 0;
        for (std::size_t i = 0; i < spins_.size(); ++i) {
            if (spins_[i] > 0) {
                b |= std::uint64_t{1} << i;
            }
        }
        return b;
    }

    std::size_t size() const noexcept {
        return spins_.size();
    }
    int operator[](std::size_t i) const noexcept {
        return spins_[i];
    }
    void set(std::size_t i, int value) noexcept {
        spins_[i] = static_cast<std::int8_t>(value);
    }
    void flip(std::size_t i) noexcept {
        spins_[i] = static_cast<std::int8_t>(-spins_[i]);
    }
    SpinState flipped() const {
        SpinState out = *this;
        for (auto &s : out.spins_) {
            s = static_cast<std::int8_t>(-s);
        }
        return out;
    }
    std::span<const std::int8_t> values() const noexcept {
        return spins_;
    }

    friend bool operator==(const SpinState &, const SpinState &) = default;
    friend auto operator<=>(const SpinState &, const SpinState &) = default;

   private:
    static void check_value(int v) {
        if (v != 1 && v != -1) {
            throw invalid_argument("spin values must be +1 or -1");
        }
    }

    std::vector<std::int8_t> spins_;
};

/// Sparse symmetric Ising model: E = -sum_{i<j} J_ij m_i m_j - sum_i h_i m_i.
///
/// Couplings are kept canonical (i<j) and mirrored into per-node neighbor rows, so
/// neighbor sums cost O(degree). Immutable after construction.
class IsingModel {
   public:
    IsingModel() = default;

    /// Duplicate pairs are summed; pairs whose total is zero are dropped.
    explicit IsingModel(std::size_t n, std::vector<Coupling> couplings = {}, std::vector<double> biases = {})
        : n_(n), biases_(std::move(biases)) {
        if (biases_.empty()) {
            biases_.assign(n, 0.0);
        }
        if (biases_.size() != n) {
            throw dimension_error("bias vector length " + std::to_string(biases_.size()) + " != node count " +
                                  std::to_string(n));
        }
        for (auto &c : couplings) {
            if (c.i == c.j) {
                throw invalid_argument("self-coupling on node " + std::to_string(c.i));
            }
            if (c.i >= n || c.j >= n) {
                throw dimension_error("coupling (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                                      ") outside model of size " + std::to_string(n));
            }
            if (c.i > c.j) {
                std::swap(c.i, c.j);
            }
        }
        std::sort(couplings.begin(), couplings.end(),
                  [](const Coupling &a, const Coupling &b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
        for (const auto &c : couplings) {
            if (!edges_.empty() && edges_.back().i == c.i && edges_.back().j == c.j) {
                edges_.back().weight += c.weight;
            } else {
                edges_.push_back(c);
            }
        }
        std::erase_if(edges_, [](const Coupling &c) { return c.weight == 0.0; });

        offsets_.assign(n + 1, 0);
        for (const auto &e : edges_) {
            ++offsets_[e.i + 1];
            ++offsets_[e.j + 1];
        }
        for (std::size_t i = 0; i < n; ++i) {
            offsets_[i + 1] += offsets_[i];
        }
        adjacency_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto &e : edges_) {
            adjacency_[fill[e.i]++] = {e.j, e.weight};
            adjacency_[fill[e.j]++] = {e.i, e.weight};
        }
        // Rows come out sorted because edges_ is sorted by (i, j) and each node
        // first receives its smaller neighbors (as j) then its larger ones (as i).
    }

    std::size_t size() const noexcept {
        return n_;
    }
    std::size_t edge_count() const noexcept {
        return edges_.size();
    }
    const std::vector<Coupling> &edges() const noexcept {
        return edges_;
    }
    const std::vector<double> &biases() const noexcept {
        return biases_;
    }
    double bias(std::size_t i) const {
        return biases_.at(i);
    }
    std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
        return {adjacency_.data() + offsets_[i], adjacency_.data() + offsets_[i + 1]};
    }
    std::size_t degree(std::size_t i) const noexcept {
        return offsets_[i + 1] - offsets_[i];
    }
    std::size_t max_degree() const noexcept {
        std::size_t d = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            d = std::max(d, degree(i));
        }
        return d;
    }

    /// J_ij, symmetric in its arguments; 0 when no edge exists.
    double coupling(std::size_t i, std::size_t j) const {
        if (i >= n_ || j >= n_) {
            throw dimension_error("node index out of range");
        }
        auto row = neighbors(i);
        auto it = std::lower_bound(row.begin(), row.end(), j,
                                   [](const Neighbor &nb, std::size_t idx) { return nb.index < idx; });
        return (it != row.end() && it->index == j) ? it->weight : 0.0;
    }

    double abs_weight_sum() const noexcept {
        double s = 0;
        for (const auto &e : edges_) {
            s += std::abs(e.weight);
        }
        for (double h : biases_) {
            s += std::abs(h);
        }
        return s;
    }

    friend bool operator==(const IsingModel &a, const IsingModel &b) {
        return a.n_ == b.n_ && a.edges_ == b.edges_ && a.biases_ == b.biases_;
    }

   private:
    std::size_t n_ = 0;
    std::vector<double> biases_;
    std::vector<Coupling> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<Neighbor> adjacency_;
};

namespace detail {

inline void require_same_size(const IsingModel &model, const SpinState &state) {
    if (state.size() != model.size()) {
        throw dimension_error("state length " + std::to_string(state.size()) + " != model size " +
                              std::to_string(model.size()));
    }
}

}  // namespace detail

inline double energy(const IsingModel &model, const SpinState &state) {
    detail::require_same_size(model, state);
    double e = 0;
    for (const auto &c : model.edges()) {
        e -= c.weight * state[c.i] * state[c.j];
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
        e -= model.biases()[i] * state[i];
    }
    return e;
}

/// sum_{i<j} J_ij (m_i m_j - 1) / 2. With J = -1 on every edge this counts cut edges.
inline double cut_value(const IsingModel &model, const SpinState &state) {
    detail::require_same_size(model, state);
    double cut = 0;
    for (const auto &c : model.edges()) {
        cut += c.weight * (state[c.i] * state[c.j] - 1) / 2.0;
    }
    return cut;
}

/// 2E / (V (V - 1)).
inline double graph_density(const IsingModel &model) {
    const auto v = static_cast<double>(model.size());
    if (model.size() < 2) {
        throw invalid_argument("graph density needs at least 2 nodes");
    }
    return 2.0 * static_cast<double>(model.edge_count()) / (v * (v - 1.0));
}

/// Erdős–Rényi Max-Cut instance: every unordered pair is an edge with probability
/// `edge_probability`, edge weights W_ij = -J_ij = +1, no biases.
struct InstanceSpec {
    std::size_t n = 0;
    double edge_probability = 0.75;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 2) {
            throw invalid_argument("instance needs n >= 2");
        }
        if (!(edge_probability >= 0.0 && edge_probability <= 1.0)) {
            throw invalid_argument("edge probability must lie in [0, 1]");
        }
    }
};

/// Pairs are drawn in row-major order (0,1), (0,2), ..., (n-2,n-1), one uniform each
/// from Stream(seed, Purpose::generator, 0); the pair is an edge iff u < p.
inline IsingModel generate_er_maxcut(const InstanceSpec &spec) {
    spec.validate();
    Stream stream(spec.seed, Purpose::generator, 0);
    std::vector<Coupling> couplings;
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = i + 1; j < spec.n; ++j) {
            if (stream.uniform() < spec.edge_probability) {
                couplings.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), -1.0});
            }
        }
    }
    return IsingModel(spec.n, std::move(couplings));
}

/// Largest model the exhaustive oracles accept.
inline constexpr std::size_t kBruteForceMaxNodes = 24;

/// Value of an exhaustive search and every state attaining it, sorted by bit index.
struct ExtremalStates {
    double value = 0;
    std::vector<SpinState> states;
};

namespace detail {

/// Walks all 2^n states in blocks of 2^low_bits, using a Gray code inside each block.
///
/// `exact(state)` evaluates a block's first state from scratch; `delta(state, i)` returns
/// the objective change from flipping spin i (before the flip). Each block re-anchors with
/// an exact evaluation, which bounds floating-point drift. Blocks are spread over threads;
/// `visit(bits, value)` is called on a per-block collector and the results are merged in
/// block order, so output is independent of thread count.
template <typename Exact, typename Delta>
std::vector<std::pair<std::uint64_t, double>> scan_minima(std::size_t n, double tolerance, Exact exact,
                                                          Delta delta) {
    const std::size_t low_bits = std::min<std::size_t>(n, 16);
    const std::uint64_t blocks = std::uint64_t{1} << (n - low_bits);
    const std::uint64_t per_block = std::uint64_t{1} << low_bits;

    struct Partial {
        double best = std::numeric_limits<double>::infinity();
        std::vector<std::pair<std::uint64_t, double>> hits;
    };
    std::vector<Partial> partials(blocks);

    auto run_block = [&](std::uint64_t block) {
        Partial &p = partials[block];
        const std::uint64_t base = block << low_bits;
        SpinState s = SpinState::from_bits(n, base);
        std::uint64_t bits = base;
        double value = exact(s);
        auto consider = [&](double v) {
            if (v < p.best - tolerance) {
                p.best = v;
                p.hits.clear();
            }
            if (v <= p.best + tolerance) {
                p.hits.emplace_back(bits, v);
            }
        };
        consider(value);
        for (std::uint64_t g = 1; g < per_block; ++g) {
            const auto i = static_cast<std::size_t>(std::countr_zero(g));
            value += delta(s, i);
            s.flip(i);
            bits ^= std::uint64_t{1} << i;
            consider(value);
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::uint64_t>(blocks, std::thread::hardware_concurrency()));
    if (workers == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) {
            run_block(b);
        }
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::uint64_t b = w; b < blocks; b += workers) {
                    run_block(b);
                }
            });
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto &p : partials) {
        best = std::min(best, p.best);
    }
    std::vector<std::pair<std::uint64_t, double>> out;
    for (const auto &p : partials) {
        for (const auto &h : p.hits) {
            if (h.second <= best + tolerance) {
                out.push_back(h);
            }
        }
    }
    return out;
}

inline void require_enumerable(const IsingModel &model) {
    if (model.size() > kBruteForceMaxNodes) {
        throw capacity_error("exhaustive search limited to " + std::to_string(kBruteForceMaxNodes) +
                             " nodes, model has " + std::to_string(model.size()));
    }
}

/// Re-evaluates candidates exactly and keeps those tied with the exact optimum.
template <typename Eval>
ExtremalStates finalize(std::size_t n, const std::vector<std::pair<std::uint64_t, double>> &candidates,
                        double tolerance, Eval eval) {
    ExtremalStates out;
    out.value = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::uint64_t, double>> exact;
    for (const auto &c : candidates) {
        double v = eval(SpinState::from_bits(n, c.first));
        exact.emplace_back(c.first, v);
        out.value = std::min(out.value, v);
    }
    std::sort(exact.begin(), exact.end());
    for (const auto &[bits, v] : exact) {
        if (v <= out.value + tolerance) {
            out.states.push_back(SpinState::from_bits(n, bits));
        }
    }
    return out;
}

}  // namespace detail

/// Exact minimum of the Hamiltonian and all minimizing states (n <= 24).
inline ExtremalStates brute_force_ground(const IsingModel &model) {
    detail::require_enumerable(model);
    const std::size_t n = model.size();
    const double tol = 1e-9 * (1.0 + model.abs_weight_sum());
    auto local = [&](const SpinState &s, std::size_t i) {
        double f = model.biases()[i];
        for (const auto &nb : model.neighbors(i)) {
            f += nb.weight * s[nb.index];
        }
        return f;
    };
    auto hits = detail::scan_minima(
        n, tol, [&](const SpinState &s) { return energy(model, s); },
        [&](const SpinState &s, std::size_t i) { return 2.0 * s[i] * local(s, i); });
    return detail::finalize(n, hits, tol, [&](const SpinState &s) { return energy(model, s); });
}

/// Exact maximum of cut_value and all maximizing states (n <= 24).
inline ExtremalStates brute_force_max_cut(const IsingModel &model) {
    detail::require_enumerable(model);
    const std::size_t n = model.size();
    const double tol = 1e-9 * (1.0 + model.abs_weight_sum());
    // Minimize the negated cut; flipping spin i changes the cut by -m_i sum_j J_ij m_j.
    auto hits = detail::scan_minima(
        n, tol, [&](const SpinState &s) { return -cut_value(model, s); },
        [&](const SpinState &s, std::size_t i) {
            double f = 0;
            for (const auto &nb : model.neighbors(i)) {
                f += nb.weight * s[nb.index];
            }
            return s[i] * f;
        });
    auto out = detail::finalize(n, hits, tol, [&](const SpinState &s) { return -cut_value(model, s); });
    out.value = -out.value;
    return out;
}

/// Energies of all 2^n states indexed by SpinState::bits().
inline std::vector<double> all_energies(const IsingModel &model, std::size_t max_nodes) {
    if (model.size() > max_nodes) {
        throw capacity_error("enumeration limited to " + std::to_string(max_nodes) + " nodes, model has " +
                             std::to_string(model.size()));
    }
    const std::size_t n = model.size();
    std::vector<double> out(std::size_t{1} << n);
    const std::size_t low_bits = std::min<std::size_t>(n, 12);
    for (std::uint64_t base = 0; base < out.size(); base += std::uint64_t{1} << low_bits) {
        SpinState s = SpinState::from_bits(n, base);
        std::uint64_t bits = base;
        double e = energy(model, s);
        out[bits] = e;
        for (std::uint64_t g = 1; g < (std::uint64_t{1} << low_bits); ++g) {
            const auto i = static_cast<std::size_t>(std::countr_zero(g));
            double f = model.biases()[i];
            for (const auto &nb : model.neighbors(i)) {
                f += nb.weight * s[nb.index];
            }
            e += 2.0 * s[i] * f;
            s.flip(i);
            bits ^= std::uint64_t{1} << i;
            out[bits] = e;
        }
    }
    return out;
}

}  // namespace pbit

#endif  // PBIT_ISING_HPP
