#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bdlp {

using Rng = std::mt19937_64;

// Stateless 64-bit mixer; used to derive independent per-replicate seeds so
// results do not depend on the execution schedule.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(base + 0x9e3779b97f4a7c15ULL * (stream + 1));
}

// Uniform in [0, 1).
inline double uniform01(Rng& rng) { return (rng() >> 11) * 0x1.0p-53; }

// Uniform in (0, 1]; safe under log().
inline double uniform01_pos(Rng& rng) { return ((rng() >> 11) + 1) * 0x1.0p-53; }

inline double exponential_sample(double rate, Rng& rng) {
  return -std::log(uniform01_pos(rng)) / rate;
}

// Box-Muller, one draw per call (no cached second variate, so the consumed
// rng stream length is deterministic).
inline double normal_sample(Rng& rng) {
  const double u = uniform01_pos(rng);
  const double v = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

// Exact Poisson draw. Means above 30 are split off in chunks (Poisson
// additivity); each chunk uses Knuth's product-of-uniforms method.
inline std::uint64_t poisson_sample(double mean, Rng& rng) {
  std::uint64_t total = 0;
  auto knuth = [&rng](double lambda) {
    const double limit = std::exp(-lambda);
    double prod = uniform01_pos(rng);
    std::uint64_t k = 0;
    while (prod > limit) {
      prod *= uniform01_pos(rng);
      ++k;
    }
    return k;
  };
  while (mean > 30.0) {
    total += knuth(30.0);
    mean -= 30.0;
  }
  if (mean > 0.0) total += knuth(mean);
  return total;
}

}  // namespace bdlp
