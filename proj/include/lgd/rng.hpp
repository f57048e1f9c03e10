#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace lgd {

// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream identified by (seed, index, channel). Paths
// own their stream, so results do not depend on how work is scheduled.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t index, std::uint64_t channel = 0)
        : engine_(mix64(mix64(mix64(seed) ^ index) ^ (channel * 0xd1b54a32d192ed03ULL))) {}

    // Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() { return normal_(engine_); }

    double exponential() { return -std::log(uniform()); }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lgd
