#pragma once

#include <cmath>
#include <cstdint>

namespace fracflow {

/// Small deterministic generator (splitmix64). Used everywhere a seed is
/// taken so results are identical across platforms and standard libraries.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        double u = 0.0;
        do {
            u = next_double();
        } while (u <= 0.0);
        const double v = next_double();
        return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
    }

  private:
    std::uint64_t state_;
};

/// Per-draw seed derivation so sweep rows can be reproduced individually.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    SplitMix64 rng(base ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    return rng.next_u64();
}

}  // namespace fracflow
