// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace csivid {

/// Seeded random source with fully specified output mapping. The standard
/// distributions are implementation-defined, so uniform/normal draws are
/// derived from the raw mt19937_64 stream directly; identical seeds give
/// identical value streams on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed), seed_mix_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive; modulo bias is
    /// irrelevant at the n used here.
    int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

    /// Standard normal via Box-Muller. Draws two uniforms per call.
    double normal() {
        double u1 = uniform();
        const double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    /// Independent substream for a named component. Mixing the salt through
    /// splitmix64 keeps substreams decorrelated from the parent.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t z = seed_mix_ + salt + 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return Rng(z ^ (z >> 31));
    }

    static Rng forked(std::uint64_t seed, std::uint64_t salt) { return Rng(seed).fork(salt); }

  private:
    std::mt19937_64 gen_;
    std::uint64_t seed_mix_ = 0;
};

}  // namespace csivid
