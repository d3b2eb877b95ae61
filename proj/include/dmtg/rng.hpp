#pragma once

// Seeded randomness helpers. All stochastic code in the library draws through
// Rng so a (seed, config) pair replays bit-identically.

#include <cstdint>
#include <random>

#include "dmtg/core.hpp"

namespace dmtg {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double gaussian(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }
    std::uint64_t next_u64() { return engine_(); }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    /// Draw from N(0, cov) via the 2x2 Cholesky factor.
    Point gaussian2(const Cov2& cov) {
        const double lxx = std::sqrt(std::max(0.0, cov.xx));
        const double lyx = lxx > 0.0 ? cov.xy / lxx : 0.0;
        const double lyy = std::sqrt(std::max(0.0, cov.yy - lyx * lyx));
        const double z0 = gaussian();
        const double z1 = gaussian();
        return {lxx * z0, lyx * z0 + lyy * z1};
    }

    /// Derive an independent child stream; used for per-cell parallel seeding.
    [[nodiscard]] static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 on (seed ^ stream)
        std::uint64_t z = seed ^ (stream + 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace dmtg
