#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace meanshift {

// Deterministic random source. Each helper documents how many engine words it
// consumes so sampling streams can be reproduced independently of call site.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // One word; 53 random mantissa bits; value in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // One word; value in [-1, 1).
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  // One word.
  bool bernoulli(double p) { return uniform01() < p; }

  // Box-Muller, cosine branch only: exactly two words per call.
  double gaussian() {
    double u1 = 1.0 - uniform01();
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // One word; inverse CDF; zero mean, scale b (variance 2 b^2).
  double laplace(double scale) {
    double u = uniform01();
    return u < 0.5 ? scale * std::log(2.0 * u + 1e-300)
                   : -scale * std::log(2.0 * (1.0 - u));
  }

  std::uint64_t word() { return engine_(); }

  // Independent stream keyed by (seed, index); splitmix64 finalizer.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return Rng(z);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace meanshift
