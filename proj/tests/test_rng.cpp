#include <gtest/gtest.h>

#include <set>

#include "pbit/rng.hpp"

using pbit::Philox4x32;
using pbit::Purpose;
using pbit::Stream;

TEST(Philox, KnownAnswerZero) {
    constexpr auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerAllOnes) {
    const auto out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPiDigits) {
    const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Stream, SameIdentityRepeats) {
    Stream a(42, Purpose::sweep, 3);
    Stream b(42, Purpose::sweep, 3);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
    EXPECT_EQ(a.position(), 100u);
}

TEST(Stream, PurposeIndexAndSeedSeparateStreams) {
    std::set<std::uint64_t> firsts;
    firsts.insert(Stream(42, Purpose::sweep, 3).next_u64());
    firsts.insert(Stream(42, Purpose::init, 3).next_u64());
    firsts.insert(Stream(42, Purpose::sweep, 4).next_u64());
    firsts.insert(Stream(43, Purpose::sweep, 3).next_u64());
    EXPECT_EQ(firsts.size(), 4u);
}

TEST(Stream, UniformInUnitIntervalWithCorrectMean) {
    Stream s(7, Purpose::sweep);
    double sum = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Stream, CoinIsFair) {
    Stream s(11, Purpose::decode);
    int plus = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const int c = s.coin();
        ASSERT_TRUE(c == 1 || c == -1);
        plus += c > 0;
    }
    EXPECT_NEAR(static_cast<double>(plus) / n, 0.5, 0.01);
}

TEST(SplitSeed, ChildrenAreDistinctAndDeterministic) {
    std::set<std::uint64_t> kids;
    for (std::uint64_t c = 0; c < 1000; ++c) {
        kids.insert(pbit::split_seed(5, c));
    }
    EXPECT_EQ(kids.size(), 1000u);
    EXPECT_EQ(pbit::split_seed(5, 17), pbit::split_seed(5, 17));
    EXPECT_NE(pbit::split_seed(5, 17), pbit::split_seed(6, 17));
}

TEST(NodeStreams, EachNodeHasItsOwnStream) {
    pbit::NodeStreams rng(9, 4);
    ASSERT_EQ(rng.size(), 4u);
    EXPECT_EQ(rng[2].next_u64(), Stream(9, Purpose::sweep, 2).next_u64());
    EXPECT_NE(Stream(9, Purpose::sweep, 1).next_u64(), Stream(9, Purpose::sweep, 2).next_u64());
}
