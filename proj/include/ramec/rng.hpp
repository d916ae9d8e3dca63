// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace ramec {

// splitmix64 finalizer; used to derive independent per-trial seeds.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Seed for trial `index` of a run keyed by `master`. Stable across platforms
// and worker counts, so trial results never depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64_mix(master + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// Deterministic random stream. All conversions from raw engine output are
/// spelled out here (no std::*_distribution) so that identical seeds give
/// bit-identical draws on every standard library.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller (the cosine branch).
    double normal() {
        const double u1 = 1.0 - uniform(); // (0, 1], keeps log finite
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Circularly symmetric complex normal with E[|z|^2] = 1.
    std::complex<double> complex_normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1)); // sqrt(-2 ln u) / sqrt(2)
        const double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace ramec
