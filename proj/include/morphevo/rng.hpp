#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace morphevo {

// Single deterministic random stream. All distribution shaping happens here
// rather than through std:: distribution objects, whose value sequences are
// not pinned by the standard; this keeps runs byte-identical across library
// versions.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1). Uses the top 53 bits of the engine output.
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(unit() * static_cast<double>(n)) % n;
  }

  bool chance(double p) { return unit() < p; }

  // Box-Muller without cached state, so the stream position after a call is
  // always advanced by exactly two draws.
  double gaussian(double mean, double stddev) {
    double u1;
    do {
      u1 = unit();
    } while (u1 == 0.0);
    const double u2 = unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * radius * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace morphevo
