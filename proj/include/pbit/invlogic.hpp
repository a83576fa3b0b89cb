#ifndef PBIT_INVLOGIC_HPP
#define PBIT_INVLOGIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"

namespace pbit {

// Spin encoding throughout: logical 1 <-> +1, logical 0 <-> -1.

enum class GateKind { and_gate, full_adder };

inline std::string gate_name(GateKind kind) {
    return kind == GateKind::and_gate ? "AND" : "FULL_ADDER";
}

/// Truth table of a gate as spin configurations, in port order
/// AND: [A, B, C=A&B]; FULL_ADDER: [A, B, Cin, S, Cout].
inline std::vector<SpinState> truth_table(GateKind kind) {
    std::vector<SpinState> rows;
    auto spin = [](unsigned bit) { return static_cast<std::int8_t>(bit ? +1 : -1); };
    if (kind == GateKind::and_gate) {
        for (unsigned a = 0; a < 2; ++a) {
            for (unsigned b = 0; b < 2; ++b) {
                rows.emplace_back(std::vector<std::int8_t>{spin(a), spin(b), spin(a & b)});
            }
        }
    } else {
        for (unsigned a = 0; a < 2; ++a) {
            for (unsigned b = 0; b < 2; ++b) {
                for (unsigned c = 0; c < 2; ++c) {
                    const unsigned sum = a + b + c;
                    rows.emplace_back(
                        std::vector<std::int8_t>{spin(a), spin(b), spin(c), spin(sum & 1u), spin(sum >> 1)});
                }
            }
        }
    }
    std::sort(rows.begin(), rows.end(), [](const SpinState &x, const SpinState &y) { return x.bits() < y.bits(); });
    return rows;
}

/// Integer Hamiltonian whose degenerate ground states are exactly a gate's truth table.
struct GateLibraryEntry {
    GateKind kind = GateKind::and_gate;
    std::size_t n_spins = 0;
    /// Couplings in canonical pair order (0,1), (0,2), ..., zeros included.
    std::vector<int> couplings;
    std::vector<int> biases;
    std::vector<SpinState> ground_set;

    IsingModel model() const {
        std::vector<Coupling> cs;
        std::size_t p = 0;
        for (std::size_t i = 0; i < n_spins; ++i) {
            for (std::size_t j = i + 1; j < n_spins; ++j, ++p) {
                cs.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), static_cast<double>(couplings[p])});
            }
        }
        return IsingModel(n_spins, std::move(cs), std::vector<double>(biases.begin(), biases.end()));
    }
};

namespace detail {

/// Reduced row echelon form of the bias equality system D h = rhs, where row a of D is
/// m(t_a) - m(t_0) and rhs_a = EJ(t_a) - EJ(t_0). `transform` maps rhs into the
/// echelon basis.
struct BiasSystem {
    std::size_t n = 0;
    std::vector<std::vector<double>> rref;       // rank rows, n columns
    std::vector<std::vector<double>> transform;  // all rows x (truth rows - 1)
    std::vector<std::size_t> pivots;
    std::vector<std::size_t> free_vars;

    BiasSystem(const std::vector<SpinState> &truth, std::size_t n_spins) : n(n_spins) {
        const std::size_t rows = truth.size() - 1;
        std::vector<std::vector<double>> a(rows, std::vector<double>(n));
        transform.assign(rows, std::vector<double>(rows, 0.0));
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] = truth[r + 1][c] - truth[0][c];
            }
            transform[r][r] = 1.0;
        }
        std::size_t rank = 0;
        std::size_t c = 0;
        for (; c < n && rank < rows; ++c) {
            std::size_t piv = rank;
            while (piv < rows && std::abs(a[piv][c]) < 1e-12) {
                ++piv;
            }
            if (piv == rows) {
                free_vars.push_back(c);
                continue;
            }
            std::swap(a[piv], a[rank]);
            std::swap(transform[piv], transform[rank]);
            const double s = a[rank][c];
            for (auto &x : a[rank]) {
                x /= s;
            }
            for (auto &x : transform[rank]) {
                x /= s;
            }
            for (std::size_t r = 0; r < rows; ++r) {
                if (r != rank && std::abs(a[r][c]) > 1e-12) {
                    const double f = a[r][c];
                    for (std::size_t k = 0; k < n; ++k) {
                        a[r][k] -= f * a[rank][k];
                    }
                    for (std::size_t k = 0; k < rows; ++k) {
                        transform[r][k] -= f * transform[rank][k];
                    }
                }
            }
            pivots.push_back(c);
            ++rank;
        }
        for (; c < n; ++c) {
            free_vars.push_back(c);
        }
        rref.assign(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(rank));
    }
};

inline bool near_integer(double x, int &out) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9) {
        return false;
    }
    out = static_cast<int>(r);
    return true;
}

}  // namespace detail

/// Exhaustive search for the lexicographically first integer Hamiltonian, couplings then
/// biases, all in [-max_weight, max_weight], whose ground set is exactly the truth table
/// with every other state strictly higher.
///
/// The truth rows must share one energy, which is a linear system in the biases; given
/// the couplings it pins every pivot bias, so only couplings (and any free biases) are
/// enumerated.
inline GateLibraryEntry derive_gate(GateKind kind, int max_weight) {
    if (max_weight < 0) {
        throw invalid_argument("max_weight must be non-negative");
    }
    const auto truth = truth_table(kind);
    const std::size_t n = truth.front().size();
    const std::size_t pairs = n * (n - 1) / 2;
    const std::size_t states = std::size_t{1} << n;

    std::vector<bool> is_truth(states, false);
    for (const auto &t : truth) {
        is_truth[t.bits()] = true;
    }
    // phi[p][s] = -m_i m_j for pair p in state s; EJ(s) = sum_p J_p phi[p][s].
    std::vector<std::vector<int>> phi(pairs, std::vector<int>(states));
    {
        std::size_t p = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j, ++p) {
                for (std::size_t s = 0; s < states; ++s) {
                    const auto st = SpinState::from_bits(n, s);
                    phi[p][s] = -st[i] * st[j];
                }
            }
        }
    }
    std::vector<std::vector<int>> spin_of(states, std::vector<int>(n));
    for (std::size_t s = 0; s < states; ++s) {
        const auto st = SpinState::from_bits(n, s);
        for (std::size_t i = 0; i < n; ++i) {
            spin_of[s][i] = st[i];
        }
    }

    const detail::BiasSystem sys(truth, n);
    const std::size_t rows = truth.size() - 1;
    const int w = max_weight;

    std::vector<int> j_params(pairs, -w);
    std::vector<int> ej(states, 0);
    for (std::size_t p = 0; p < pairs; ++p) {
        for (std::size_t s = 0; s < states; ++s) {
            ej[s] += j_params[p] * phi[p][s];
        }
    }

    std::vector<double> rhs(rows), trhs(rows);
    std::vector<int> h(n), free_vals(sys.free_vars.size());

    auto check_h = [&]() {
        const auto e_of = [&](std::size_t s) {
            int e = ej[s];
            for (std::size_t i = 0; i < n; ++i) {
                e -= h[i] * spin_of[s][i];
            }
            return e;
        };
        const int e0 = e_of(truth[0].bits());
        for (std::size_t s = 0; s < states; ++s) {
            const int e = e_of(s);
            if (is_truth[s] ? e != e0 : e <= e0) {
                return false;
            }
        }
        return true;
    };

    auto solve_biases = [&]() -> std::optional<std::vector<int>> {
        for (std::size_t a = 0; a < rows; ++a) {
            rhs[a] = ej[truth[a + 1].bits()] - ej[truth[0].bits()];
        }
        for (std::size_t r = 0; r < rows; ++r) {
            double acc = 0;
            for (std::size_t k = 0; k < rows; ++k) {
                acc += sys.transform[r][k] * rhs[k];
            }
            trhs[r] = acc;
        }
        for (std::size_t r = sys.pivots.size(); r < rows; ++r) {
            if (std::abs(trhs[r]) > 1e-9) {
                return std::nullopt;
            }
        }
        std::fill(free_vals.begin(), free_vals.end(), -w);
        while (true) {
            for (std::size_t f = 0; f < sys.free_vars.size(); ++f) {
                h[sys.free_vars[f]] = free_vals[f];
            }
            bool ok = true;
            for (std::size_t r = 0; r < sys.pivots.size() && ok; ++r) {
                double v = trhs[r];
                for (auto f : sys.free_vars) {
                    v -= sys.rref[r][f] * h[f];
                }
                int iv = 0;
                ok = detail::near_integer(v, iv) && std::abs(iv) <= w;
                h[sys.pivots[r]] = iv;
            }
            if (ok && check_h()) {
                return h;
            }
            std::size_t f = sys.free_vars.size();
            while (f > 0 && free_vals[f - 1] == w) {
                free_vals[f - 1] = -w;
                --f;
            }
            if (f == 0) {
                return std::nullopt;
            }
            ++free_vals[f - 1];
        }
    };

    while (true) {
        if (auto found = solve_biases()) {
            GateLibraryEntry entry;
            entry.kind = kind;
            entry.n_spins = n;
            entry.couplings = j_params;
            entry.biases = *found;
            entry.ground_set = truth;
            return entry;
        }
        // Odometer step, last pair fastest; EJ updated incrementally.
        std::size_t p = pairs;
        while (p > 0 && j_params[p - 1] == w) {
            for (std::size_t s = 0; s < states; ++s) {
                ej[s] -= 2 * w * phi[p - 1][s];
            }
            j_params[p - 1] = -w;
            --p;
        }
        if (p == 0) {
            break;
        }
        ++j_params[p - 1];
        for (std::size_t s = 0; s < states; ++s) {
            ej[s] += phi[p - 1][s];
        }
    }
    throw infeasible_error("no " + gate_name(kind) + " Hamiltonian with |weight| <= " + std::to_string(max_weight));
}

struct GateLibrary {
    GateLibraryEntry and_gate;
    GateLibraryEntry full_adder;

    const GateLibraryEntry &operator[](GateKind kind) const {
        return kind == GateKind::and_gate ? and_gate : full_adder;
    }
};

/// AND and FULL_ADDER derived with |weight| <= 2; computed once.
inline const GateLibrary &default_library() {
    static const GateLibrary lib{derive_gate(GateKind::and_gate, 2), derive_gate(GateKind::full_adder, 2)};
    return lib;
}

struct GateInstance {
    GateKind kind;
    std::vector<NodeIndex> ports;
};

/// Composed gate network. Clamped spins keep their place in `model` but are excluded
/// from sampling (see reduce()).
struct CircuitNet {
    std::size_t n_bits = 0;
    IsingModel model;
    std::vector<GateInstance> gates;
    /// Port spins, least significant bit first.
    std::vector<NodeIndex> p, q, f;
    std::map<NodeIndex, int> clamps;
};

struct MultiplierOptions {
    /// Clamp the LSBs of p and q to 1 (odd factors).
    bool odd_factors = true;
};

/// Array multiplier F = p * q over n-bit factors: an n x n AND array of partial
/// products summed by n - 1 ripple-carry rows of n adders. Half adders are full adders
/// whose spare input is a separate spin clamped to logical 0.
inline CircuitNet build_multiplier(std::size_t n_bits, const GateLibrary &lib = default_library(),
                                   const MultiplierOptions &options = {}) {
    if (n_bits < 2) {
        throw invalid_argument("multiplier needs n_bits >= 2");
    }
    CircuitNet net;
    net.n_bits = n_bits;
    NodeIndex next = 0;
    auto fresh = [&]() { return next++; };
    auto zero = [&]() {
        const NodeIndex z = fresh();
        net.clamps[z] = -1;
        return z;
    };
    for (std::size_t i = 0; i < n_bits; ++i) {
        net.p.push_back(fresh());
    }
    for (std::size_t i = 0; i < n_bits; ++i) {
        net.q.push_back(fresh());
    }
    // pp[i][j] = p_i AND q_j, weight i + j
    std::vector<std::vector<NodeIndex>> pp(n_bits, std::vector<NodeIndex>(n_bits));
    for (std::size_t j = 0; j < n_bits; ++j) {
        for (std::size_t i = 0; i < n_bits; ++i) {
            pp[i][j] = fresh();
            net.gates.push_back({GateKind::and_gate, {net.p[i], net.q[j], pp[i][j]}});
        }
    }
    // running[w] = spin holding the partial sum bit of weight w
    std::vector<NodeIndex> running;
    for (std::size_t i = 0; i < n_bits; ++i) {
        running.push_back(pp[i][0]);
    }
    for (std::size_t j = 1; j < n_bits; ++j) {
        NodeIndex carry = zero();
        for (std::size_t i = 0; i < n_bits; ++i) {
            const std::size_t w = i + j;
            const NodeIndex a = w < running.size() ? running[w] : zero();
            const NodeIndex s = fresh();
            const NodeIndex cout = fresh();
            net.gates.push_back({GateKind::full_adder, {a, pp[i][j], carry, s, cout}});
            if (w < running.size()) {
                running[w] = s;
            } else {
                running.push_back(s);
            }
            carry = cout;
        }
        running.push_back(carry);
    }
    net.f = running;

    std::vector<Coupling> couplings;
    std::vector<double> biases(next, 0.0);
    for (const auto &g : net.gates) {
        const auto &entry = lib[g.kind];
        std::size_t pidx = 0;
        for (std::size_t a = 0; a < entry.n_spins; ++a) {
            biases[g.ports[a]] += entry.biases[a];
            for (std::size_t b = a + 1; b < entry.n_spins; ++b, ++pidx) {
                if (entry.couplings[pidx] != 0) {
                    couplings.push_back({g.ports[a], g.ports[b], static_cast<double>(entry.couplings[pidx])});
                }
            }
        }
    }
    net.model = IsingModel(next, std::move(couplings), std::move(biases));
    if (options.odd_factors) {
        net.clamps[net.p[0]] = +1;
        net.clamps[net.q[0]] = +1;
    }
    return net;
}

/// Fixes the F port to the binary digits of `semiprime`.
inline CircuitNet clamp_output(CircuitNet net, std::uint64_t semiprime) {
    const std::size_t width = net.f.size();
    if (width < 64 && semiprime >> width != 0) {
        throw invalid_argument(std::to_string(semiprime) + " does not fit the " + std::to_string(width) +
                               "-bit product port");
    }
    for (std::size_t b = 0; b < width; ++b) {
        net.clamps[net.f[b]] = ((semiprime >> b) & 1u) ? +1 : -1;
    }
    return net;
}

/// Removes the F-port clamps.
inline CircuitNet unclamp_output(CircuitNet net) {
    for (auto s : net.f) {
        net.clamps.erase(s);
    }
    return net;
}

/// Model over the unclamped spins with clamped neighbors folded into biases.
/// energy(full, extend(s)) == energy(model, s) + offset.
struct ReducedNet {
    IsingModel model;
    std::vector<NodeIndex> free_spins;  // reduced index -> full index
    std::vector<int> full_template;     // clamped values, 0 for free spins
    double offset = 0;

    SpinState extend(const SpinState &reduced) const {
        SpinState full(full_template.size());
        for (std::size_t i = 0; i < full_template.size(); ++i) {
            if (full_template[i] != 0) {
                full.set(i, full_template[i]);
            }
        }
        for (std::size_t r = 0; r < free_spins.size(); ++r) {
            full.set(free_spins[r], reduced[r]);
        }
        return full;
    }
};

inline ReducedNet reduce(const CircuitNet &net) {
    const auto &m = net.model;
    ReducedNet out;
    out.full_template.assign(m.size(), 0);
    for (const auto &[s, v] : net.clamps) {
        if (v != 1 && v != -1) {
            throw invalid_argument("clamp values must be +1 or -1");
        }
        out.full_template[s] = v;
    }
    std::vector<NodeIndex> to_reduced(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (out.full_template[i] == 0) {
            to_reduced[i] = static_cast<NodeIndex>(out.free_spins.size());
            out.free_spins.push_back(static_cast<NodeIndex>(i));
        }
    }
    std::vector<double> biases(out.free_spins.size(), 0.0);
    for (std::size_t r = 0; r < out.free_spins.size(); ++r) {
        biases[r] = m.biases()[out.free_spins[r]];
    }
    std::vector<Coupling> couplings;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (out.full_template[i] != 0) {
            out.offset -= m.biases()[i] * out.full_template[i];
        }
    }
    for (const auto &e : m.edges()) {
        const int ci = out.full_template[e.i];
        const int cj = out.full_template[e.j];
        if (ci == 0 && cj == 0) {
            couplings.push_back({to_reduced[e.i], to_reduced[e.j], e.weight});
        } else if (ci != 0 && cj != 0) {
            out.offset -= e.weight * ci * cj;
        } else if (ci != 0) {
            biases[to_reduced[e.j]] += e.weight * ci;
        } else {
            biases[to_reduced[e.i]] += e.weight * cj;
        }
    }
    out.model = IsingModel(out.free_spins.size(), std::move(couplings), std::move(biases));
    return out;
}

/// Unsigned integer read from port spins (LSB first, +1 = 1).
inline std::uint64_t port_value(const SpinState &full, const std::vector<NodeIndex> &port) {
    std::uint64_t v = 0;
    for (std::size_t b = 0; b < port.size(); ++b) {
        if (full[port[b]] > 0) {
            v |= std::uint64_t{1} << b;
        }
    }
    return v;
}

enum class Formulation { dense, invertible };

/// P-bits needed to factor with n-bit factors: the dense (F - pq)^2 formulation uses the
/// factor bits minus the two clamped LSBs; the invertible one uses the multiplier's spins.
inline std::size_t pbit_count(std::size_t n_bits, Formulation formulation) {
    if (n_bits < 2) {
        throw invalid_argument("pbit_count needs n_bits >= 2");
    }
    if (formulation == Formulation::dense) {
        return 2 * (n_bits - 1);
    }
    return build_multiplier(n_bits).model.size();
}

struct NetStats {
    std::size_t spins = 0;
    std::size_t edges = 0;
    double density = 0;
    std::set<double> abs_couplings;
    std::set<double> abs_biases;
};

inline NetStats net_stats(const CircuitNet &net) {
    NetStats s;
    s.spins = net.model.size();
    s.edges = net.model.edge_count();
    s.density = graph_density(net.model);
    for (const auto &e : net.model.edges()) {
        s.abs_couplings.insert(std::abs(e.weight));
    }
    for (double h : net.model.biases()) {
        if (h != 0.0) {
            s.abs_biases.insert(std::abs(h));
        }
    }
    return s;
}

namespace io {

/// Instance format plus `port p|q|F <indices...>` and `clamp <i> <+1|-1>` lines.
inline void write_netlist(std::ostream &out, const CircuitNet &net) {
    write_model(out, net.model);
    auto port = [&](const char *name, const std::vector<NodeIndex> &spins) {
        out << "port " << name;
        for (auto s : spins) {
            out << " " << s;
        }
        out << "\n";
    };
    port("p", net.p);
    port("q", net.q);
    port("F", net.f);
    for (const auto &[s, v] : net.clamps) {
        out << "clamp " << s << " " << (v > 0 ? "+1" : "-1") << "\n";
    }
}

}  // namespace io
}  // namespace pbit

#endif  // PBIT_INVLOGIC_HPP
