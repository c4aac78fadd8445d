// =============================================================================
// rng.hpp - Philox4x32-10 counter-based generator with named child streams.
//
// Every random draw in fqlens comes from a `Philox` engine built from
// (seed, stream). The 64-bit seed is the Philox key; the 64-bit stream id
// occupies the upper half of the 128-bit counter and the lower half counts
// output blocks. Distinct stream ids therefore never overlap, and stream i
// produces the same sequence no matter which thread or in which order it is
// consumed.
//
// Stream-id layout used across the project:
//
//   bits 56..63  purpose tag (StreamTag)
//   bits 32..55  generation / replicate group
//   bits  0..31  index inside the group (replicate, couple, ...)
// =============================================================================
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fqlens {

inline constexpr const char* kRngName = "philox4x32-10";

enum class StreamTag : std::uint8_t {
    bootstrap = 1,
    founders = 2,
    pairing = 3,
    fertility = 4,
    gametes = 5,
    test = 0xFF,
};

constexpr std::uint64_t stream_id(StreamTag tag, std::uint64_t group, std::uint64_t index) noexcept {
    return (static_cast<std::uint64_t>(tag) << 56) | ((group & 0xFFFFFFu) << 32) |
           (index & 0xFFFFFFFFu);
}

class Philox {
public:
    using result_type = std::uint32_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 4) {
            block_ = generate(block_counter_++);
            index_ = 0;
        }
        return block_[index_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform integer in [0, n), n > 0, without modulo bias.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Raw Philox4x32-10 bijection, exposed for known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                              std::array<std::uint32_t, 2> key) noexcept;

private:
    std::array<std::uint32_t, 4> generate(std::uint64_t n) const noexcept {
        return block({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                      static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
                     key_);
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_counter_ = 0;
    std::array<std::uint32_t, 4> block_{};
    unsigned index_ = 4;
};

}  // namespace fqlens
