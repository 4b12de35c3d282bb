#pragma once

// Counter-keyed random streams. Every Monte Carlo work item draws from its
// own stream derived from (seed, index), so results do not depend on the
// order in which items are processed.

#include <cstdint>
#include <limits>

namespace hetnet {

/// SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state = 0) noexcept : state_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Stream for work item `index` under `seed`.
inline SplitMix64 stream(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) noexcept {
    SplitMix64 mix(seed ^ (salt * 0xd1b54a32d192ed03ULL));
    const std::uint64_t a = mix();
    SplitMix64 mix2(a + index * 0x9e3779b97f4a7c15ULL);
    return SplitMix64(mix2() ^ index);
}

} // namespace hetnet
