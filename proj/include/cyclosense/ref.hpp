// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cyclosense/channel.hpp"
#include "cyclosense/matrix.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense::ref {

// Serial reference implementations of the estimation kernels: single-pass
// loops, per-sample std::polar phases, direct O(N^2) DFT. These are the
// ground truth the OpenMP kernels are tested against and the baseline the
// benchmark tool compares against. Keep them boring.

ComplexMatrix cov_lag(const IQFrame& frame, int lag);

ComplexMatrix cyclic_cov(const IQFrame& frame, double alpha_hz, int lag, bool conjugate);

std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> x);

double msdf_peak(const SampleStream& stream, double alpha_hz, int n_fft,
                 double resolution_hz, bool conjugate);

}  // namespace cyclosense::ref
