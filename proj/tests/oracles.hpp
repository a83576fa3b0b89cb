// Slow, obviously-correct reference implementations used to check the library.

#ifndef PBIT_TESTS_ORACLES_HPP
#define PBIT_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pbit/ising.hpp"

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline Matrix coupling_matrix(const pbit::IsingModel &m) {
    Matrix j(m.size(), std::vector<double>(m.size(), 0.0));
    for (const auto &e : m.edges()) {
        j[e.i][e.j] += e.weight;
        j[e.j][e.i] += e.weight;
    }
    return j;
}

inline std::vector<int> spins_of(std::size_t n, std::uint64_t bits) {
    std::vector<int> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = (bits >> i) & 1u ? +1 : -1;
    }
    return s;
}

// E = -1/2 sum_{i != j} J_ij m_i m_j - sum_i h_i m_i with the full symmetric matrix.
inline double energy(const Matrix &j, const std::vector<double> &h, const std::vector<int> &s) {
    double e = 0;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = 0; b < s.size(); ++b) {
            if (a != b) {
                e -= 0.5 * j[a][b] * s[a] * s[b];
            }
        }
        e -= h[a] * s[a];
    }
    return e;
}

inline double energy(const pbit::IsingModel &m, std::uint64_t bits) {
    return energy(coupling_matrix(m), m.biases(), spins_of(m.size(), bits));
}

// Number of edges whose endpoints differ.
inline double cut(const pbit::IsingModel &m, std::uint64_t bits) {
    const auto s = spins_of(m.size(), bits);
    double c = 0;
    for (const auto &e : m.edges()) {
        if (s[e.i] != s[e.j]) {
            c += -e.weight;
        }
    }
    return c;
}

struct Extremum {
    double value = std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> states;
};

inline Extremum ground(const pbit::IsingModel &m) {
    const auto j = coupling_matrix(m);
    Extremum out;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << m.size()); ++b) {
        const double e = energy(j, m.biases(), spins_of(m.size(), b));
        if (e < out.value - 1e-9) {
            out.value = e;
            out.states.clear();
        }
        if (std::abs(e - out.value) <= 1e-9) {
            out.states.push_back(b);
        }
    }
    return out;
}

inline std::vector<double> boltzmann(const pbit::IsingModel &m, double beta) {
    const auto j = coupling_matrix(m);
    std::vector<double> p(std::size_t{1} << m.size());
    double z = 0;
    for (std::uint64_t b = 0; b < p.size(); ++b) {
        p[b] = std::exp(-beta * energy(j, m.biases(), spins_of(m.size(), b)));
        z += p[b];
    }
    for (double &x : p) {
        x /= z;
    }
    return p;
}

inline double total_variation(const std::vector<double> &p, const std::vector<double> &q) {
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d += std::abs(p[i] - q[i]);
    }
    return d / 2;
}

// Random integer-weighted model for property checks (splitmix64, independent of the library RNG).
inline pbit::IsingModel random_model(std::size_t n, std::uint64_t seed, int max_weight = 3) {
    auto next = [&seed] {
        std::uint64_t z = (seed += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    auto weight = [&] { return static_cast<double>(static_cast<int>(next() % (2 * max_weight + 1)) - max_weight); };
    std::vector<pbit::Coupling> c;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (next() % 3 != 0) {
                c.push_back({static_cast<pbit::NodeIndex>(i), static_cast<pbit::NodeIndex>(j), weight()});
            }
        }
    }
    std::vector<double> h(n);
    for (auto &x : h) {
        x = weight();
    }
    return pbit::IsingModel(n, c, h);
}

}  // namespace oracle

#endif
