// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace cyclosense {

// Counter-based splittable generator (splitmix64 core). Every random stream
// in the library is addressed by a key tuple (seed, a, b, c); distinct tuples
// give statistically independent streams. This is what makes Monte Carlo
// results independent of worker count and scheduling order: a trial's stream
// depends only on its key, never on which thread runs it.
//
// Gaussians are produced by an explicit Box-Muller transform instead of
// std::normal_distribution, whose output is implementation-defined and would
// break reproducibility across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t state) : state_(state) {}

  static Rng stream(std::uint64_t seed, std::uint64_t a = 0, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    std::uint64_t h = mix(seed + 0x9E3779B97F4A7C15ull);
    h = mix(h ^ (a + 0xBF58476D1CE4E5B9ull));
    h = mix(h ^ (b + 0x94D049BB133111EBull));
    h = mix(h ^ (c + 0xD6E8FEB86659FD93ull));
    return Rng(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double next_double_open() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal N(0, 1).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(next_double_open()));
    const double t = 6.283185307179586476925286766559 * next_double();
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Circularly symmetric complex normal with E|z|^2 = 1.
  std::complex<double> next_cnormal() {
    const double r = std::sqrt(-std::log(next_double_open()));
    const double t = 6.283185307179586476925286766559 * next_double();
    return {r * std::cos(t), r * std::sin(t)};
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace cyclosense
