#ifndef PBIT_RNG_HPP
#define PBIT_RNG_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace pbit {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
///
/// Counter-based: the output is a pure function of (counter, key), so any stream can be
/// positioned or split without sequential state. Reference vectors live in tests/test_rng.cpp.
class Philox4x32 {
   public:
    using counter_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static constexpr counter_type block(counter_type ctr, key_type key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

   private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// What a stream of random numbers is used for. Part of the counter, so two purposes
/// never share draws even for the same node index.
enum class Purpose : std::uint32_t {
    generator = 1,  // instance generation
    sweep = 2,      // p-bit update uniforms
    init = 3,       // initial spin states
    decode = 4,     // copy-conflict coin flips
    split = 5,      // child seed derivation
};

namespace detail {

constexpr Philox4x32::key_type key_of(std::uint64_t seed) noexcept {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

constexpr std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept {
    return std::uint64_t{lo} | (std::uint64_t{hi} << 32);
}

}  // namespace detail

/// Derives an independent child seed, e.g. one per trial or per instance.
constexpr std::uint64_t split_seed(std::uint64_t master, std::uint64_t child) noexcept {
    const auto out = Philox4x32::block(
        {static_cast<std::uint32_t>(child), static_cast<std::uint32_t>(child >> 32), 0u,
         static_cast<std::uint32_t>(Purpose::split)},
        detail::key_of(master));
    return detail::join(out[0], out[1]);
}

/// One sequential stream identified by (seed, purpose, index).
///
/// Draw t of the stream is Philox(counter = {t_lo, t_hi, index, purpose}, key = seed).
class Stream {
   public:
    Stream() = default;
    Stream(std::uint64_t seed, Purpose purpose, std::uint32_t index = 0) noexcept
        : key_(detail::key_of(seed)), index_(index), purpose_(static_cast<std::uint32_t>(purpose)) {
    }

    std::uint64_t next_u64() noexcept {
        const auto out = Philox4x32::block(
            {static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32), index_,
             purpose_},
            key_);
        ++position_;
        return detail::join(out[0], out[1]);
    }

    /// Uniform double on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// +1 or -1 with equal probability.
    int coin() noexcept {
        return (next_u64() >> 63) != 0 ? +1 : -1;
    }

    std::uint64_t position() const noexcept {
        return position_;
    }

   private:
    Philox4x32::key_type key_{};
    std::uint32_t index_ = 0;
    std::uint32_t purpose_ = 0;
    std::uint64_t position_ = 0;
};

/// One stream per node for a single purpose. Node updates draw only from their own
/// stream, which makes the outcome of a sweep independent of the order in which
/// non-interacting nodes are visited.
class NodeStreams {
   public:
    NodeStreams(std::uint64_t seed, std::size_t node_count, Purpose purpose = Purpose::sweep) {
        streams_.reserve(node_count);
        for (std::size_t i = 0; i < node_count; ++i) {
            streams_.emplace_back(seed, purpose, static_cast<std::uint32_t>(i));
        }
    }

    Stream &operator[](std::size_t node) noexcept {
        return streams_[node];
    }
    std::size_t size() const noexcept {
        return streams_.size();
    }

   private:
    std::vector<Stream> streams_;
};

}  // namespace pbit

#endif  // PBIT_RNG_HPP
