#ifndef PBIT_SPARSIFY_HPP
#define PBIT_SPARSIFY_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"
#include "pbit/rng.hpp"

namespace pbit {

/// Bounded-degree model built from a dense one by replacing every logical node with a
/// ferromagnetic chain of physical nodes.
struct SparseEmbedding {
    IsingModel physical;
    std::size_t logical_n = 0;
    /// copy_map[i] = physical nodes of logical node i, source first, then chain order.
    std::vector<std::vector<NodeIndex>> copy_map;
    double w0 = 0;
    std::size_t k = 0;

    /// Physical nodes per logical node (1 when no copies were needed).
    std::size_t chain_length() const {
        return copy_map.empty() ? 0 : copy_map.front().size();
    }
    std::size_t copy_edge_count() const {
        std::size_t c = 0;
        for (const auto &chain : copy_map) {
            c += chain.size() - 1;
        }
        return c;
    }
};

/// Number of problem edges a chain of `copies + 1` physical nodes can host when every
/// physical node keeps total degree <= k.
inline std::size_t chain_capacity(std::size_t copies, std::size_t k) {
    if (copies == 0) {
        return k;
    }
    return 2 * (k - 1) + (copies - 1) * (k - 2);
}

/// Smallest number of extra copies per node such that a node of degree `max_degree`
/// fits under degree bound k.
inline std::size_t required_copies(std::size_t max_degree, std::size_t k) {
    if (k < 3) {
        throw invalid_argument("degree bound k must be >= 3, got " + std::to_string(k));
    }
    std::size_t copies = 0;
    while (chain_capacity(copies, k) < max_degree) {
        ++copies;
    }
    return copies;
}

/// Smallest degree bound k >= 3 for which nodes of degree `max_degree` need exactly
/// `chain_length - 1` copies.
inline std::size_t degree_bound_for_chain(std::size_t max_degree, std::size_t chain_length) {
    if (chain_length == 0) {
        throw invalid_argument("chain length must be >= 1");
    }
    for (std::size_t k = 3; k <= std::max<std::size_t>(3, max_degree); ++k) {
        const auto c = required_copies(max_degree, k);
        if (c + 1 == chain_length) {
            return k;
        }
        if (c + 1 < chain_length) {
            break;
        }
    }
    throw infeasible_error("no degree bound gives chains of length " + std::to_string(chain_length) +
                           " for max degree " + std::to_string(max_degree));
}

/// Copy-chain sparsification.
///
/// Every logical node i gets the same number of copies C = required_copies(max degree, k).
/// Physical node i is the source; its copies are numbered n + i*C + c. The i's neighbors
/// (ascending index) fill the source first, then each chain node in order; capacities are
/// k-1 at chain ends and k-2 in the interior. Each endpoint of a dense edge picks its host
/// independently, and biases stay on the source.
inline SparseEmbedding sparsify(const IsingModel &dense, std::size_t k, double w0) {
    if (!(w0 > 0.0)) {
        throw invalid_argument("copy edge strength w0 must be > 0");
    }
    const std::size_t n = dense.size();
    const std::size_t copies = required_copies(dense.max_degree(), k);

    SparseEmbedding emb;
    emb.logical_n = n;
    emb.w0 = w0;
    emb.k = k;
    emb.copy_map.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        emb.copy_map[i].push_back(static_cast<NodeIndex>(i));
        for (std::size_t c = 0; c < copies; ++c) {
            emb.copy_map[i].push_back(static_cast<NodeIndex>(n + i * copies + c));
        }
    }
    if (copies == 0) {
        emb.physical = dense;
        return emb;
    }

    // host[i][r] = physical node of i that carries i's r-th neighbor.
    std::vector<std::vector<NodeIndex>> host(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto &chain = emb.copy_map[i];
        std::size_t pos = 0;
        std::size_t used = 0;
        for (std::size_t r = 0; r < dense.degree(i); ++r) {
            const std::size_t cap = (pos == 0 || pos == copies) ? k - 1 : k - 2;
            if (used == cap) {
                ++pos;
                used = 0;
            }
            host[i].push_back(chain[pos]);
            ++used;
        }
    }

    std::vector<Coupling> couplings;
    couplings.reserve(dense.edge_count() + n * copies);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = dense.neighbors(i);
        for (std::size_t r = 0; r < row.size(); ++r) {
            const auto j = row[r].index;
            if (j < i) {
                continue;
            }
            // rank of i among j's neighbors
            auto jrow = dense.neighbors(j);
            std::size_t ri = 0;
            while (jrow[ri].index != i) {
                ++ri;
            }
            couplings.push_back({host[i][r], host[j][ri], row[r].weight});
        }
        const auto &chain = emb.copy_map[i];
        for (std::size_t c = 0; c + 1 < chain.size(); ++c) {
            couplings.push_back({chain[c], chain[c + 1], w0});
        }
    }
    std::vector<double> biases(n * (copies + 1), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        biases[i] = dense.biases()[i];
    }
    emb.physical = IsingModel(n * (copies + 1), std::move(couplings), std::move(biases));
    return emb;
}

namespace detail {

inline void require_physical(const SparseEmbedding &emb, const SpinState &physical) {
    if (physical.size() != emb.physical.size()) {
        throw dimension_error("physical state length " + std::to_string(physical.size()) +
                              " != embedding size " + std::to_string(emb.physical.size()));
    }
}

}  // namespace detail

/// Physical state in which every copy of logical node i carries m_i.
inline SpinState embed_state(const SparseEmbedding &emb, const SpinState &logical) {
    if (logical.size() != emb.logical_n) {
        throw dimension_error("logical state length " + std::to_string(logical.size()) + " != " +
                              std::to_string(emb.logical_n));
    }
    SpinState out(emb.physical.size());
    for (std::size_t i = 0; i < emb.logical_n; ++i) {
        for (auto p : emb.copy_map[i]) {
            out.set(p, logical[i]);
        }
    }
    return out;
}

struct DecodePolicy {
    enum class Kind { coin_flip, majority_vote };
    Kind kind = Kind::coin_flip;
    std::uint64_t seed = 0;
};

/// Resolves physical states to logical ones. Disagreeing chains are settled by a fair
/// coin (CoinFlip) or by the sign of the copy sum (MajorityVote, coin on ties). Coins
/// come from Stream(seed, Purpose::decode) and are only drawn for conflicting chains.
class Decoder {
   public:
    explicit Decoder(DecodePolicy policy) : policy_(policy), coins_(policy.seed, Purpose::decode, 0) {
    }

    SpinState operator()(const SparseEmbedding &emb, const SpinState &physical) {
        detail::require_physical(emb, physical);
        SpinState out(emb.logical_n);
        for (std::size_t i = 0; i < emb.logical_n; ++i) {
            int sum = 0;
            for (auto p : emb.copy_map[i]) {
                sum += physical[p];
            }
            const int len = static_cast<int>(emb.copy_map[i].size());
            int value;
            if (sum == len || sum == -len) {
                value = sum > 0 ? +1 : -1;
            } else if (policy_.kind == DecodePolicy::Kind::majority_vote && sum != 0) {
                value = sum > 0 ? +1 : -1;
            } else {
                value = coins_.coin();
            }
            out.set(i, value);
        }
        return out;
    }

   private:
    DecodePolicy policy_;
    Stream coins_;
};

/// One-shot decode with a fresh coin stream seeded from the policy.
inline SpinState decode(const SparseEmbedding &emb, const SpinState &physical, DecodePolicy policy) {
    return Decoder(policy)(emb, physical);
}

/// Fraction of logical nodes whose copies are not unanimous.
inline double chain_break_fraction(const SparseEmbedding &emb, const SpinState &physical) {
    detail::require_physical(emb, physical);
    if (emb.logical_n == 0) {
        return 0.0;
    }
    std::size_t broken = 0;
    for (const auto &chain : emb.copy_map) {
        for (auto p : chain) {
            if (physical[p] != physical[chain.front()]) {
                ++broken;
                break;
            }
        }
    }
    return static_cast<double>(broken) / static_cast<double>(emb.logical_n);
}

namespace io {

/// Physical model, then `copy <logical> <physical...>` lines and `meta w0 <v> k <int>`.
inline void write_embedding(std::ostream &out, const SparseEmbedding &emb) {
    write_model(out, emb.physical);
    for (std::size_t i = 0; i < emb.copy_map.size(); ++i) {
        out << "copy " << i;
        for (auto p : emb.copy_map[i]) {
            out << " " << p;
        }
        out << "\n";
    }
    out << "meta w0 " << format_real(emb.w0) << " k " << emb.k << "\n";
}

inline SparseEmbedding read_embedding(std::istream &in) {
    SparseEmbedding emb;
    std::vector<std::pair<std::size_t, std::vector<NodeIndex>>> chains;
    bool have_meta = false;
    emb.physical = read_model(in, [&](const std::vector<std::string> &tok, std::size_t line) {
        if (tok[0] == "copy") {
            if (tok.size() < 3) {
                throw parse_error("expected 'copy <logical> <physical...>'", line);
            }
            std::vector<NodeIndex> chain;
            for (std::size_t t = 2; t < tok.size(); ++t) {
                chain.push_back(parse_number<NodeIndex>(tok[t], line));
            }
            chains.emplace_back(parse_number<std::size_t>(tok[1], line), std::move(chain));
            return true;
        }
        if (tok[0] == "meta") {
            if (tok.size() != 5 || tok[1] != "w0" || tok[3] != "k") {
                throw parse_error("expected 'meta w0 <value> k <int>'", line);
            }
            emb.w0 = parse_number<double>(tok[2], line);
            emb.k = parse_number<std::size_t>(tok[4], line);
            have_meta = true;
            return true;
        }
        return false;
    });
    if (!have_meta) {
        throw parse_error("missing 'meta' line", 0);
    }
    emb.logical_n = chains.size();
    emb.copy_map.resize(chains.size());
    std::vector<bool> seen(emb.physical.size(), false);
    for (auto &[logical, chain] : chains) {
        if (logical >= chains.size() || !emb.copy_map[logical].empty()) {
            throw parse_error("copy lines must list each logical node 0..n-1 once", 0);
        }
        for (auto p : chain) {
            if (p >= emb.physical.size() || seen[p]) {
                throw parse_error("physical node listed twice or out of range", 0);
            }
            seen[p] = true;
        }
        emb.copy_map[logical] = std::move(chain);
    }
    return emb;
}

}  // namespace io
}  // namespace pbit

#endif  // PBIT_SPARSIFY_HPP
