#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace derivfpca {

/// Seedable random number generator with fully specified output.
///
/// std::mt19937_64 is bit-reproducible across platforms, but the standard
/// distributions are not. Uniforms are therefore built directly from the raw
/// 64-bit stream and normals via Box-Muller (two uniforms per draw), so a
/// given seed yields the same sequence everywhere.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Standard normal draw via Box-Muller; consumes exactly two uniforms.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform integer in [lo, hi], both ends inclusive.
  int uniform_int(int lo, int hi) {
    const int span = hi - lo + 1;
    int v = lo + static_cast<int>(uniform() * span);
    return v > hi ? hi : v;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace derivfpca
