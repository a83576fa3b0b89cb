#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pbit/sparsify.hpp"

using namespace pbit;

namespace {

IsingModel complete(std::size_t n) {
    std::vector<Coupling> c;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            c.push_back({static_cast<NodeIndex>(i), static_cast<NodeIndex>(j), -1.0});
        }
    }
    return IsingModel(n, c);
}

}  // namespace

TEST(ChainCapacity, Values) {
    EXPECT_EQ(chain_capacity(0, 5), 5u);
    EXPECT_EQ(chain_capacity(1, 3), 4u);
    EXPECT_EQ(chain_capacity(2, 3), 5u);
    EXPECT_EQ(chain_capacity(1, 51), 100u);
    EXPECT_EQ(chain_capacity(2, 51), 149u);
}

TEST(RequiredCopies, FiveNodeAllToAllWithKThreeNeedsOneCopy) {
    EXPECT_EQ(required_copies(4, 3), 1u);
    EXPECT_EQ(required_copies(3, 3), 0u);
    EXPECT_EQ(required_copies(5, 3), 2u);
    EXPECT_THROW(required_copies(4, 2), pbit::invalid_argument);
}

TEST(DegreeBoundForChain, SmallestBoundWithThatChainLength) {
    EXPECT_EQ(degree_bound_for_chain(14, 2), 8u);
    EXPECT_EQ(required_copies(14, 8), 1u);
    EXPECT_EQ(required_copies(14, 7), 2u);
    EXPECT_EQ(degree_bound_for_chain(4, 2), 3u);
    EXPECT_EQ(degree_bound_for_chain(2, 1), 3u);
    EXPECT_THROW(degree_bound_for_chain(4, 9), infeasible_error);
}

TEST(Sparsify, FullAdderShapedExample) {
    const auto emb = sparsify(complete(5), 3, 4.0);
    EXPECT_EQ(emb.physical.size(), 10u);
    EXPECT_EQ(emb.chain_length(), 2u);
    EXPECT_EQ(emb.copy_edge_count(), 5u);
    EXPECT_LE(emb.physical.max_degree(), 3u);
    EXPECT_EQ(emb.physical.edge_count(), 10u + 5u);
}

TEST(Sparsify, DegreeBoundAndEdgeConservation) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = generate_er_maxcut({30, 0.75, seed});
        for (std::size_t k : {3u, 5u, 8u, 12u}) {
            const auto emb = sparsify(g, k, 2.0);
            EXPECT_LE(emb.physical.max_degree(), k);
            double problem = 0, copy = 0;
            for (const auto &e : emb.physical.edges()) {
                (e.weight == 2.0 ? copy : problem) += 1;
            }
            EXPECT_EQ(problem, static_cast<double>(g.edge_count()));
            EXPECT_EQ(copy, static_cast<double>(emb.copy_edge_count()));
            // every problem edge joins copies of its original endpoints
            std::vector<std::size_t> owner(emb.physical.size());
            for (std::size_t i = 0; i < emb.copy_map.size(); ++i) {
                for (auto p : emb.copy_map[i]) {
                    owner[p] = i;
                }
            }
            for (const auto &e : emb.physical.edges()) {
                if (e.weight != 2.0) {
                    EXPECT_DOUBLE_EQ(g.coupling(owner[e.i], owner[e.j]), e.weight);
                }
            }
        }
    }
}

TEST(Sparsify, NoCopiesLeavesModelUnchanged) {
    const auto g = generate_er_maxcut({8, 0.5, 3});
    const auto emb = sparsify(g, 20, 1.0);
    EXPECT_EQ(emb.physical, g);
    EXPECT_EQ(emb.chain_length(), 1u);
}

TEST(Sparsify, BiasesStayOnSource) {
    const auto m = oracle::random_model(7, 2);
    const auto emb = sparsify(m, 3, 1.5);
    for (std::size_t i = 0; i < m.size(); ++i) {
        EXPECT_DOUBLE_EQ(emb.physical.bias(i), m.bias(i));
        for (std::size_t c = 1; c < emb.copy_map[i].size(); ++c) {
            EXPECT_DOUBLE_EQ(emb.physical.bias(emb.copy_map[i][c]), 0.0);
        }
    }
}

TEST(Sparsify, EnergyOffsetIdentityForAllStates) {
    const auto m = oracle::random_model(9, 6);
    const double w0 = 2.5;
    const auto emb = sparsify(m, 4, w0);
    for (std::uint64_t b = 0; b < 512; ++b) {
        const auto s = SpinState::from_bits(9, b);
        EXPECT_NEAR(energy(emb.physical, embed_state(emb, s)),
                    oracle::energy(m, b) - w0 * static_cast<double>(emb.copy_edge_count()), 1e-9);
    }
}

TEST(Sparsify, StrongCopiesPreserveGroundStates) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto g = generate_er_maxcut({10, 0.75, seed});
        const double w0 = 1.0 + g.abs_weight_sum();
        const auto emb = sparsify(g, degree_bound_for_chain(g.max_degree(), 2), w0);
        ASSERT_EQ(emb.physical.size(), 20u);
        const auto dense = oracle::ground(g);
        const auto phys = brute_force_ground(emb.physical);
        ASSERT_EQ(phys.states.size(), dense.states.size());
        for (std::size_t i = 0; i < phys.states.size(); ++i) {
            EXPECT_EQ(chain_break_fraction(emb, phys.states[i]), 0.0);
            EXPECT_EQ(decode(emb, phys.states[i], {}).bits(), dense.states[i]);
        }
    }
}

TEST(Decode, InvertsEmbed) {
    const auto g = generate_er_maxcut({12, 0.75, 5});
    const auto emb = sparsify(g, 4, 1.0);
    for (std::uint64_t b = 0; b < 4096; b += 41) {
        const auto s = SpinState::from_bits(12, b);
        EXPECT_EQ(decode(emb, embed_state(emb, s), {DecodePolicy::Kind::coin_flip, 3}), s);
        EXPECT_EQ(decode(emb, embed_state(emb, s), {DecodePolicy::Kind::majority_vote, 3}), s);
    }
}

TEST(Decode, AgreementAndMajority) {
    SparseEmbedding emb;
    emb.physical = IsingModel(3);
    emb.logical_n = 1;
    emb.copy_map = {{0, 1, 2}};
    EXPECT_EQ(decode(emb, SpinState::parse("---"), {}).str(), "-");
    EXPECT_EQ(decode(emb, SpinState::parse("++-"), {DecodePolicy::Kind::majority_vote, 0}).str(), "+");
    EXPECT_EQ(decode(emb, SpinState::parse("-+-"), {DecodePolicy::Kind::majority_vote, 0}).str(), "-");
    EXPECT_DOUBLE_EQ(chain_break_fraction(emb, SpinState::parse("-+-")), 1.0);
    EXPECT_THROW(decode(emb, SpinState(2), {}), dimension_error);
}

TEST(Decode, CoinFlipIsFairOnConflicts) {
    SparseEmbedding emb;
    emb.physical = IsingModel(2);
    emb.logical_n = 1;
    emb.copy_map = {{0, 1}};
    Decoder d({DecodePolicy::Kind::coin_flip, 12});
    int plus = 0;
    for (int i = 0; i < 10000; ++i) {
        plus += d(emb, SpinState::parse("+-"))[0] > 0;
    }
    EXPECT_NEAR(plus / 10000.0, 0.5, 0.02);
}

TEST(Decode, EvenMajorityTieUsesCoin) {
    SparseEmbedding emb;
    emb.physical = IsingModel(4);
    emb.logical_n = 1;
    emb.copy_map = {{0, 1, 2, 3}};
    Decoder d({DecodePolicy::Kind::majority_vote, 4});
    std::set<int> seen;
    for (int i = 0; i < 64; ++i) {
        seen.insert(d(emb, SpinState::parse("++--"))[0]);
    }
    EXPECT_EQ(seen.size(), 2u);
}

TEST(EmbeddingFormat, RoundTrip) {
    const auto emb = sparsify(generate_er_maxcut({9, 0.75, 2}), 4, 3.25);
    std::stringstream s;
    io::write_embedding(s, emb);
    const auto back = io::read_embedding(s);
    EXPECT_EQ(back.physical, emb.physical);
    EXPECT_EQ(back.copy_map, emb.copy_map);
    EXPECT_EQ(back.logical_n, emb.logical_n);
    EXPECT_DOUBLE_EQ(back.w0, 3.25);
    EXPECT_EQ(back.k, 4u);
}

TEST(EmbeddingFormat, RejectsDuplicatePhysicalNodes) {
    std::istringstream in("ising 2\ncopy 0 0 1\ncopy 1 1\nmeta w0 1 k 3\n");
    EXPECT_THROW(io::read_embedding(in), parse_error);
    std::istringstream no_meta("ising 1\ncopy 0 0\n");
    EXPECT_THROW(io::read_embedding(no_meta), parse_error);
}
