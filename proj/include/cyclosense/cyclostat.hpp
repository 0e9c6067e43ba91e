// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "cyclosense/channel.hpp"
#include "cyclosense/matrix.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense {

// Lagged covariance and cyclic covariance estimators, plus the
// spectral-correlation peak statistic used by the MSDF baselines.
//
// The OpenMP kernels here reduce over a fixed chunk grid that depends only on
// the input size, with partial sums combined in chunk order, so results are
// bit-identical for any worker count. Serial one-pass references live in
// ref.hpp and are compared against these kernels in the tests.

struct CyclicCovPair {
  ComplexMatrix cov;      // lagged covariance at the feature's lag
  ComplexMatrix cyc_cov;  // cyclic covariance at (alpha, lag)
  bool conjugate = false;
  double alpha_hz = 0.0;
  int lag = 0;
  std::size_t n_used = 0;  // terms averaged (N - lag, with 1/N normalization)
};

// (1/N) sum_{n=lag}^{N-1} x(n) x^H(n-lag). The sum starts at n = lag so every
// index is valid; normalization stays 1/N.
ComplexMatrix cov_lag(const IQFrame& frame, int lag);

// (1/N) sum_{n=lag}^{N-1} x(n) x^H(n-lag) e^{-j 2 pi alpha n Ts}; the
// conjugate variant replaces x^H with x^T, which is where carrier-doubling
// features live. The phase uses the absolute sample index within the frame.
ComplexMatrix cyclic_cov(const IQFrame& frame, double alpha_hz, int lag, bool conjugate);

// Both matrices of the significance test in one pass description.
CyclicCovPair estimate_cov_pair(const IQFrame& frame, const CyclicFeature& feature);

// Spectral-correlation peak: cyclic periodogram magnitudes over
// non-overlapping rectangular blocks of n_fft samples, averaged and
// normalized by the stream's average energy per sample; returns the peak
// over frequency. Blocks are zero-padded when n_fft alone cannot meet
// resolution_hz. Throws ConfigError when the stream is shorter than one
// block or n_fft is not a power of two.
double msdf_peak(const SampleStream& stream, double alpha_hz, int n_fft,
                 double resolution_hz, bool conjugate);

}  // namespace cyclosense
