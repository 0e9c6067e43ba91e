// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace cyclosense {

// Radix-2 in-place FFT with a reusable twiddle/bit-reversal plan.
// Forward is the unnormalized DFT; inverse applies the 1/N factor.
// Length must be a power of two.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::complex<double>* x) const;
  void inverse(std::complex<double>* x) const;

 private:
  void transform(std::complex<double>* x, bool inverse) const;

  std::size_t n_ = 0;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> twiddle_;  // e^{-2pi i k / n}, k < n/2
};

// One-shot helpers.
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x);
std::vector<std::complex<double>> ifft(std::vector<std::complex<double>> x);

}  // namespace cyclosense
