#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dpg {

// Deterministic RNG with a pinned bit-exact output stream.
//
// The engine is std::mt19937_64, whose sequence is fixed by the C++
// standard.  The standard library *distributions* are not portable, so
// uniform and normal variates are generated here by hand:
//   uniform01: (x >> 11) * 2^-53, a double in [0, 1)
//   normal:    Box-Muller on two uniform01 draws (spare value cached)
// Identical seeds therefore reproduce identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n), n >= 1.  Rejection-free modulo is fine here:
  // n is tiny compared to 2^64 so the bias is far below anything observable,
  // and the mapping is pinned.
  std::uint64_t uniform_index(std::uint64_t n) { return engine_() % n; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dpg
