#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace mapdoa {

// Counter-style SplitMix64 stream (Steele, Lea, Flood 2014). The output
// sequence for a given seed is part of the reproducibility contract of the
// benchmark harness: it must not change across releases.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Circularly-symmetric complex normal CN(0, 1).
  std::complex<double> complex_gaussian() {
    const double scale = 0.70710678118654752440;  // 1/sqrt(2)
    const double re = gaussian();
    const double im = gaussian();
    return {re * scale, im * scale};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Position-derived seed for trial (a, b) of a base seed. Stable across
// releases; changing the trial count never changes earlier trials' streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  SplitMix64 s(base);
  std::uint64_t h = s.next_u64() ^ (a * 0x9e3779b97f4a7c15ULL);
  SplitMix64 t(h);
  return t.next_u64() ^ (b * 0xbf58476d1ce4e5b9ULL);
}

}  // namespace mapdoa
