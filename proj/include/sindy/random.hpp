#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace sindy {

/// Seeded Gaussian stream: mt19937_64 bits mapped to (0,1] uniforms and
/// transformed with Box-Muller. Both steps are fully specified, so a given
/// seed produces the same stream on every platform.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    // 53-bit mantissa uniforms; u1 shifted into (0, 1] so the log is finite.
    const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(angle);
    has_cached_ = true;
    return r * std::cos(angle);
  }

  double next(double stddev) { return stddev * next(); }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace sindy
