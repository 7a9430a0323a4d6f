#pragma once

#include <cstdint>
#include <limits>

namespace selmer {

/// Counter-based random stream.
///
/// Output `i` of the stream keyed by `(seed, stream)` is a pure function of
/// `(seed, stream, i)`: a SplitMix64 finaliser applied to the key-offset
/// counter. Streams with distinct ids never share state, so work can be split
/// across threads by handing each trial its own stream id and the results do
/// not depend on the thread count.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return mix(key_ + kGolden * ++counter_); }

    /// Independent child stream; does not advance this one.
    [[nodiscard]] CounterRng split(std::uint64_t child) const noexcept {
        CounterRng out(0);
        out.key_ = mix(key_ ^ mix(child + 0x9e3779b97f4a7c15ULL) ^ 0xd1b54a32d192ed03ULL);
        return out;
    }

    bool bit() noexcept {
        if (bits_left_ == 0) {
            bit_buffer_ = (*this)();
            bits_left_ = 64;
        }
        const bool b = (bit_buffer_ & 1U) != 0;
        bit_buffer_ >>= 1;
        --bits_left_;
        return b;
    }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) noexcept {
        const std::uint64_t limit = max() - (max() % bound);
        std::uint64_t x = (*this)();
        while (x >= limit) x = (*this)();
        return x % bound;
    }

    [[nodiscard]] std::uint64_t position() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t bit_buffer_ = 0;
    unsigned bits_left_ = 0;
};

}  // namespace selmer
