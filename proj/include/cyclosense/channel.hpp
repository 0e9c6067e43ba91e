// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cyclosense/errors.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense {

// Quasi-static channel: one complex gain per antenna, constant over a frame.
struct ChannelRealization {
  std::vector<std::complex<double>> gains;

  int size() const { return static_cast<int>(gains.size()); }
};

// Per-antenna noise variance plus spatial correlation coefficient.
// Cross-antenna covariance is variance * rho^|i-j|.
struct NoiseSpec {
  double variance = 1.0;
  double rho = 0.0;

  void validate() const;
};

// One observation frame: M x N complex samples, antenna-major.
struct IQFrame {
  int num_antennas = 0;
  std::size_t num_samples = 0;
  double sample_rate_hz = 0.0;
  std::vector<std::complex<double>> samples;

  IQFrame() = default;
  IQFrame(int m, std::size_t n, double fs)
      : num_antennas(m), num_samples(n), sample_rate_hz(fs),
        samples(static_cast<std::size_t>(m) * n) {}

  std::complex<double>& at(int antenna, std::size_t n) {
    return samples[static_cast<std::size_t>(antenna) * num_samples + n];
  }
  std::complex<double> at(int antenna, std::size_t n) const {
    return samples[static_cast<std::size_t>(antenna) * num_samples + n];
  }
  std::span<const std::complex<double>> antenna(int k) const {
    return {samples.data() + static_cast<std::size_t>(k) * num_samples, num_samples};
  }
  std::span<std::complex<double>> antenna(int k) {
    return {samples.data() + static_cast<std::size_t>(k) * num_samples, num_samples};
  }

  // Copy of one antenna's samples as a stream (for the per-antenna detectors).
  SampleStream antenna_stream(int k) const;
};

// Independent unit-mean-square Rayleigh gains: each entry is a circularly
// symmetric complex Gaussian with E|h|^2 = 1.
ChannelRealization draw_rayleigh(int m, std::uint64_t seed);

// Temporally white, spatially correlated complex Gaussian noise. Columns are
// i.i.d. M-vectors with covariance variance * Toeplitz(rho^|i-j|), realized
// through a Cholesky factor. rho = 1 degenerates to one stream replicated to
// every antenna.
IQFrame gen_noise(int m, std::size_t n, const NoiseSpec& spec, std::uint64_t seed);

// Composes h_soi * a * soi + h_int * c * interferer + noise, where a sets the
// per-antenna pre-fading SNR to snr_db against spec.variance and c sets the
// interferer-to-SOI power ratio per sir_db (sir_db = -20 means the interferer
// carries 100x the SOI's power). The SOI reference power sigma^2 10^(snr/10)
// also anchors the interferer scale when the SOI itself is absent.
IQFrame compose_frame(const SampleStream* soi, const ChannelRealization* h_soi,
                      const SampleStream* interferer, const ChannelRealization* h_int,
                      const IQFrame& noise, const NoiseSpec& noise_spec, double snr_db,
                      std::optional<double> sir_db);

}  // namespace cyclosense
