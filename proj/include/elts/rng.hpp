#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace elts {

// Deterministic RNG: all distribution shaping is done by hand on top of the
// raw mt19937_64 stream, so results are reproducible across platforms for a
// given seed (std::normal_distribution etc. are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t u64() { return engine_(); }

  // Uniform in [0, 1).
  double real() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [lo, hi] inclusive.
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = real(), u2 = real();
    while (u1 <= 0.0) u1 = real();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace elts
