#pragma once

#include "focalforge/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace ff {

/// Seeded random stream with portable output. std::mt19937_64 has a pinned
/// bit stream, but the standard distributions do not, so uniform/normal
/// draws are derived from the raw bits directly to keep reports
/// byte-reproducible for a fixed seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller on the portable uniforms.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  Vec gaussian_vector(int n) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  /// Uniform direction on the unit sphere of R^n.
  Vec unit_vector(int n) {
    Vec v = gaussian_vector(n);
    double norm = v.norm();
    while (norm < 1e-12) {
      v = gaussian_vector(n);
      norm = v.norm();
    }
    return v / norm;
  }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ff
