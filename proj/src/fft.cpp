// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/fft.hpp"

#include <cmath>

#include "cyclosense/errors.hpp"

namespace cyclosense {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }
}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (!is_pow2(n)) throw ConfigError("fft: length must be a power of two");
  bitrev_.resize(n);
  std::size_t log2n = 0;
  while ((std::size_t{1} << log2n) < n) ++log2n;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < log2n; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
    bitrev_[i] = r;
  }
  twiddle_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = -kTwoPi * static_cast<double>(k) / static_cast<double>(n);
    twiddle_[k] = {std::cos(ang), std::sin(ang)};
  }
}

void FftPlan::transform(std::complex<double>* x, bool inverse) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (j > i) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n_ / len;
    for (std::size_t base = 0; base < n_; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> w = twiddle_[k * step];
        if (inverse) w = std::conj(w);
        const auto t = x[base + k + half] * w;
        x[base + k + half] = x[base + k] - t;
        x[base + k] += t;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] *= scale;
  }
}

void FftPlan::forward(std::complex<double>* x) const { transform(x, false); }
void FftPlan::inverse(std::complex<double>* x) const { transform(x, true); }

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x) {
  FftPlan plan(x.size());
  plan.forward(x.data());
  return x;
}

std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x) {
  FftPlan plan(x.size());
  plan.inverse(x.data());
  return x;
}

}  // namespace cyclosense
