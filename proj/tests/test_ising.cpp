#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "pbit/io.hpp"
#include "pbit/ising.hpp"

using namespace pbit;

TEST(SpinState, BitsAndTextRoundTrip) {
    const auto s = SpinState::from_bits(5, 0b10110);
    EXPECT_EQ(s.str(), "-++-+");
    EXPECT_EQ(s.bits(), 0b10110u);
    EXPECT_EQ(SpinState::parse("-++-+"), s);
    EXPECT_EQ(s.flipped().str(), "+--+-");
    EXPECT_THROW(SpinState::parse("+0-"), pbit::invalid_argument);
    EXPECT_THROW(SpinState(std::vector<std::int8_t>{1, 0}), pbit::invalid_argument);
}

TEST(IsingModel, SumsDuplicatesAndDropsZeros) {
    IsingModel m(3, {{0, 1, 1.0}, {1, 0, 2.0}, {1, 2, 1.0}, {2, 1, -1.0}});
    EXPECT_EQ(m.edge_count(), 1u);
    EXPECT_DOUBLE_EQ(m.coupling(0, 1), 3.0);
    EXPECT_DOUBLE_EQ(m.coupling(1, 0), 3.0);
    EXPECT_DOUBLE_EQ(m.coupling(1, 2), 0.0);
}

TEST(IsingModel, RejectsBadInput) {
    EXPECT_THROW(IsingModel(3, {{1, 1, 1.0}}), pbit::invalid_argument);
    EXPECT_THROW(IsingModel(3, {{0, 3, 1.0}}), dimension_error);
    EXPECT_THROW(IsingModel(3, {}, {1.0, 2.0}), dimension_error);
}

TEST(IsingModel, NeighborRowsAreSortedAndSymmetric) {
    const auto m = oracle::random_model(9, 3);
    for (std::size_t i = 0; i < m.size(); ++i) {
        auto row = m.neighbors(i);
        for (std::size_t r = 1; r < row.size(); ++r) {
            EXPECT_LT(row[r - 1].index, row[r].index);
        }
        for (const auto &nb : row) {
            EXPECT_DOUBLE_EQ(m.coupling(nb.index, i), nb.weight);
        }
    }
}

TEST(Energy, MatchesDenseMatrixFormula) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto m = oracle::random_model(8, seed);
        for (std::uint64_t b = 0; b < 256; b += 7) {
            EXPECT_NEAR(energy(m, SpinState::from_bits(8, b)), oracle::energy(m, b), 1e-12);
        }
    }
}

TEST(Energy, TwoSpinFerromagnet) {
    IsingModel m(2, {{0, 1, 1.0}});
    EXPECT_DOUBLE_EQ(energy(m, SpinState::parse("++")), -1.0);
    EXPECT_DOUBLE_EQ(energy(m, SpinState::parse("+-")), 1.0);
    EXPECT_THROW(energy(m, SpinState(3)), dimension_error);
}

TEST(CutValue, CountsCutEdges) {
    const auto g = generate_er_maxcut({10, 0.6, 4});
    for (std::uint64_t b = 0; b < 1024; b += 37) {
        EXPECT_DOUBLE_EQ(cut_value(g, SpinState::from_bits(10, b)), oracle::cut(g, b));
    }
}

TEST(GraphDensity, CompleteAndEmpty) {
    EXPECT_DOUBLE_EQ(graph_density(generate_er_maxcut({6, 1.0, 1})), 1.0);
    EXPECT_DOUBLE_EQ(graph_density(generate_er_maxcut({6, 0.0, 1})), 0.0);
    EXPECT_THROW(graph_density(IsingModel(1)), pbit::invalid_argument);
}

TEST(Generator, DeterministicWithExpectedDensity) {
    const auto a = generate_er_maxcut({60, 0.75, 9});
    const auto b = generate_er_maxcut({60, 0.75, 9});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, generate_er_maxcut({60, 0.75, 10}));
    EXPECT_NEAR(graph_density(a), 0.75, 0.05);
    for (const auto &e : a.edges()) {
        EXPECT_EQ(e.weight, -1.0);
    }
    EXPECT_THROW(generate_er_maxcut({1, 0.5, 0}), pbit::invalid_argument);
    EXPECT_THROW(generate_er_maxcut({5, 1.5, 0}), pbit::invalid_argument);
}

TEST(BruteForce, GroundMatchesNaiveEnumeration) {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto m = oracle::random_model(10, 100 + seed);
        const auto got = brute_force_ground(m);
        const auto want = oracle::ground(m);
        EXPECT_NEAR(got.value, want.value, 1e-9);
        ASSERT_EQ(got.states.size(), want.states.size());
        for (std::size_t i = 0; i < got.states.size(); ++i) {
            EXPECT_EQ(got.states[i].bits(), want.states[i]);
        }
    }
}

TEST(BruteForce, MaxCutOfFourCycleIsFour) {
    IsingModel c4(4, {{0, 1, -1}, {1, 2, -1}, {2, 3, -1}, {0, 3, -1}});
    const auto r = brute_force_max_cut(c4);
    EXPECT_DOUBLE_EQ(r.value, 4.0);
    ASSERT_EQ(r.states.size(), 2u);
    EXPECT_EQ(r.states[0].str(), "+-+-");
    EXPECT_EQ(r.states[1].str(), "-+-+");
}

TEST(BruteForce, MaxCutEqualsGroundOfMaxCutHamiltonian) {
    const auto g = generate_er_maxcut({14, 0.75, 2});
    const auto cut = brute_force_max_cut(g);
    const auto gs = brute_force_ground(g);
    // cut = (sum_{i<j} J_ij m_i m_j - sum J_ij) / 2 = (-E + |E|) / 2 for unit weights
    EXPECT_DOUBLE_EQ(cut.value, (-gs.value + static_cast<double>(g.edge_count())) / 2.0);
    EXPECT_EQ(cut.states, gs.states);
}

TEST(BruteForce, RefusesLargeModels) {
    EXPECT_THROW(brute_force_ground(IsingModel(25)), capacity_error);
    EXPECT_THROW(brute_force_max_cut(IsingModel(25)), capacity_error);
}

TEST(AllEnergies, IndexedByBits) {
    const auto m = oracle::random_model(6, 5);
    const auto e = all_energies(m, 10);
    ASSERT_EQ(e.size(), 64u);
    for (std::uint64_t b = 0; b < 64; ++b) {
        EXPECT_NEAR(e[b], oracle::energy(m, b), 1e-12);
    }
    EXPECT_THROW(all_energies(m, 5), capacity_error);
}

TEST(InstanceFormat, RoundTrip) {
    const auto m = oracle::random_model(7, 8);
    std::stringstream s;
    io::write_model(s, m);
    EXPECT_EQ(io::read_model(s), m);
}

TEST(InstanceFormat, CommentsAndBlankLines) {
    std::istringstream in("# header\nising 3\n\nh 0 0.5  # bias\ne 0 2 -1\n");
    const auto m = io::read_model(in);
    EXPECT_EQ(m.size(), 3u);
    EXPECT_DOUBLE_EQ(m.bias(0), 0.5);
    EXPECT_DOUBLE_EQ(m.coupling(0, 2), -1.0);
}

TEST(InstanceFormat, ErrorsCarryLineNumbers) {
    std::istringstream bad("ising 3\ne 0 1 x\n");
    try {
        io::read_model(bad);
        FAIL() << "expected parse_error";
    } catch (const parse_error &e) {
        EXPECT_EQ(e.line, 2u);
    }
    std::istringstream order("ising 3\ne 2 1 1\n");
    EXPECT_THROW(io::read_model(order), parse_error);
    std::istringstream missing("e 0 1 1\n");
    EXPECT_THROW(io::read_model(missing), parse_error);
    std::istringstream unknown("ising 2\nz 1\n");
    EXPECT_THROW(io::read_model(unknown), parse_error);
}
