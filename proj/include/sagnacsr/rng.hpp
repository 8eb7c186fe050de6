#pragma once

// Counter-based random streams. A stream is fully determined by
// (seed, stream id, counter), so sample i can be drawn on any thread in any
// order and still produce the same value.

#include <cstdint>
#include <limits>

namespace sagnacsr {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// UniformRandomBitGenerator over a keyed counter; usable with <random> distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
        : key_(mix64(mix64(seed) ^ mix64(stream + 0x632be59bd9b4e019ULL) ^ mix64(~index)))
    {
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Stream ids keep the noise and detection draws for one seed independent.
enum class RngStream : std::uint64_t { phase_noise = 1, detection = 2 };

}  // namespace sagnacsr
