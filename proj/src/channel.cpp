// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/channel.hpp"

#include <cmath>

#include "cyclosense/linalg.hpp"
#include "cyclosense/rng.hpp"

namespace cyclosense {

void NoiseSpec::validate() const {
  if (variance <= 0.0) throw ConfigError("noise spec: variance must be > 0");
  if (rho < 0.0 || rho > 1.0) throw ConfigError("noise spec: rho must be in [0, 1]");
}

SampleStream IQFrame::antenna_stream(int k) const {
  SampleStream s;
  s.sample_rate_hz = sample_rate_hz;
  const auto row = antenna(k);
  s.data.assign(row.begin(), row.end());
  return s;
}

ChannelRealization draw_rayleigh(int m, std::uint64_t seed) {
  if (m < 1) throw ConfigError("draw_rayleigh: m must be >= 1");
  Rng rng = Rng::stream(seed, 0x6368616eull);  // channel stream
  ChannelRealization h;
  h.gains.resize(m);
  for (auto& g : h.gains) g = rng.next_cnormal();
  return h;
}

IQFrame gen_noise(int m, std::size_t n, const NoiseSpec& spec, std::uint64_t seed) {
  if (m < 1 || n < 1) throw ConfigError("gen_noise: m and n must be >= 1");
  spec.validate();

  Rng rng = Rng::stream(seed, 0x6e6f6973ull);  // noise stream
  IQFrame frame(m, n, 0.0);
  const double sigma = std::sqrt(spec.variance);

  if (spec.rho == 1.0) {
    // Fully correlated: one white stream replicated to every antenna.
    for (std::size_t t = 0; t < n; ++t) {
      const auto w = sigma * rng.next_cnormal();
      for (int k = 0; k < m; ++k) frame.at(k, t) = w;
    }
    return frame;
  }

  if (spec.rho == 0.0) {
    for (int k = 0; k < m; ++k)
      for (std::size_t t = 0; t < n; ++t) frame.at(k, t) = sigma * rng.next_cnormal();
    return frame;
  }

  // Spatially correlated: color white columns with the Cholesky factor of
  // Toeplitz(rho^|i-j|). The factor is lower triangular, so antenna k only
  // needs the first k+1 white entries of each column.
  const ComplexMatrix l = cholesky_toeplitz_rho(m, spec.rho);
  std::vector<std::complex<double>> white(m);
  for (std::size_t t = 0; t < n; ++t) {
    for (int k = 0; k < m; ++k) white[k] = rng.next_cnormal();
    for (int i = 0; i < m; ++i) {
      std::complex<double> acc = 0.0;
      for (int j = 0; j <= i; ++j) acc += l(i, j) * white[j];
      frame.at(i, t) = sigma * acc;
    }
  }
  return frame;
}

namespace {

double mean_power(const SampleStream& s) {
  double acc = 0.0;
  for (const auto& v : s.data) acc += std::norm(v);
  return acc / static_cast<double>(s.data.size());
}

}  // namespace

IQFrame compose_frame(const SampleStream* soi, const ChannelRealization* h_soi,
                      const SampleStream* interferer, const ChannelRealization* h_int,
                      const IQFrame& noise, const NoiseSpec& noise_spec, double snr_db,
                      std::optional<double> sir_db) {
  noise_spec.validate();
  const int m = noise.num_antennas;
  const std::size_t n = noise.num_samples;

  if (soi && (soi->size() != n))
    throw ConfigError("compose_frame: SOI length does not match the noise frame");
  if (soi && (!h_soi || h_soi->size() != m))
    throw ConfigError("compose_frame: SOI channel does not match the antenna count");
  if (interferer && (interferer->size() != n))
    throw ConfigError("compose_frame: interferer length does not match the noise frame");
  if (interferer && (!h_int || h_int->size() != m))
    throw ConfigError("compose_frame: interferer channel does not match the antenna count");
  if (sir_db && !interferer)
    throw ConfigError("compose_frame: sir_db given without an interferer");
  if (interferer && !sir_db)
    throw ConfigError("compose_frame: interferer given without sir_db");

  IQFrame out = noise;

  // Per-antenna average SNR is defined pre-fading (fading gains are unit
  // mean-square), so the SOI is scaled to sigma^2 10^(snr/10) regardless of
  // this frame's channel draw. The same reference power anchors the
  // interferer when the SOI is absent.
  const double soi_target = noise_spec.variance * std::pow(10.0, snr_db / 10.0);

  if (soi) {
    const double p = mean_power(*soi);
    if (p <= 0.0) throw ConfigError("compose_frame: SOI has zero power, cannot set SNR");
    const double scale = std::sqrt(soi_target / p);
    for (int k = 0; k < m; ++k) {
      const auto g = h_soi->gains[k] * scale;
      for (std::size_t t = 0; t < n; ++t) out.at(k, t) += g * soi->data[t];
    }
  }

  if (interferer) {
    const double p = mean_power(*interferer);
    if (p <= 0.0) throw ConfigError("compose_frame: interferer has zero power");
    const double int_target = soi_target * std::pow(10.0, -*sir_db / 10.0);
    const double scale = std::sqrt(int_target / p);
    for (int k = 0; k < m; ++k) {
      const auto g = h_int->gains[k] * scale;
      for (std::size_t t = 0; t < n; ++t) out.at(k, t) += g * interferer->data[t];
    }
  }

  return out;
}

}  // namespace cyclosense
