// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "cyclosense/errors.hpp"

namespace cyclosense {

// Parametric description of a BPSK source.
struct SignalSpec {
  double carrier_freq_hz = 80e3;
  double symbol_period_s = 25e-6;
  double sample_rate_hz = 320e3;
  double power = 1.0;  // mean squared amplitude
  double initial_phase_rad = 0.0;

  // Integer oversampling factor; throws ConfigError when the symbol period
  // is not an integer number of samples.
  int samples_per_symbol() const;
  void validate() const;
};

// One cyclic feature of a modulated signal: cyclic frequency, whether it
// lives in the conjugate cyclic correlation, and the preferred lag.
struct CyclicFeature {
  double alpha_hz = 0.0;
  bool conjugate = false;
  int lag_samples = 0;
};

struct SampleStream {
  std::vector<std::complex<double>> data;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return data.size(); }
};

// Sampled BPSK with a rectangular NRZ pulse and explicit complex exponential
// carrier: s(n) = sqrt(power) * b(n/L) * exp(j(2 pi fc n Ts + phi)), with
// equiprobable i.i.d. symbols. Deterministic for a fixed seed.
SampleStream gen_bpsk(const SignalSpec& spec, std::size_t n_samples, std::uint64_t seed);

// Theoretical cyclic frequencies of rectangular BPSK: alpha = k/Tb in the
// plain cyclic correlation and alpha = +-2 fc + k/Tb in the conjugate one,
// k in {-1, 0, 1}, excluding alpha = 0 and anything beyond the sample rate.
std::vector<CyclicFeature> cyclic_features_bpsk(const SignalSpec& spec);

// Offline calibration: lag in [0, max_lag] maximizing the magnitude of the
// cyclic autocorrelation of a clean generated signal of n_probe samples.
// Exhaustive scan; fixed internal seed, so the result is reproducible.
int best_lag(const SignalSpec& spec, const CyclicFeature& feature, int max_lag,
             std::size_t n_probe);

}  // namespace cyclosense
