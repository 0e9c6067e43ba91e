// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/ref.hpp"

#include <cmath>

namespace cyclosense::ref {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ComplexMatrix cov_lag(const IQFrame& frame, int lag) {
  const int m = frame.num_antennas;
  const std::size_t n = frame.num_samples;
  if (lag < 0 || static_cast<std::size_t>(lag) >= n)
    throw ConfigError("ref::cov_lag: lag must be in [0, N)");
  ComplexMatrix r(m, m);
  for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        r(i, j) += frame.at(i, t) * std::conj(frame.at(j, t - static_cast<std::size_t>(lag)));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) *= inv_n;
  return r;
}

ComplexMatrix cyclic_cov(const IQFrame& frame, double alpha_hz, int lag, bool conjugate) {
  const int m = frame.num_antennas;
  const std::size_t n = frame.num_samples;
  if (lag < 0 || static_cast<std::size_t>(lag) >= n)
    throw ConfigError("ref::cyclic_cov: lag must be in [0, N)");
  ComplexMatrix r(m, m);
  for (std::size_t t = static_cast<std::size_t>(lag); t < n; ++t) {
    const double ang = -kTwoPi * alpha_hz / frame.sample_rate_hz * static_cast<double>(t);
    const auto w = std::polar(1.0, ang);
    for (int i = 0; i < m; ++i) {
      const auto xiw = frame.at(i, t) * w;
      for (int j = 0; j < m; ++j) {
        const auto xj = frame.at(j, t - static_cast<std::size_t>(lag));
        r(i, j) += xiw * (conjugate ? xj : std::conj(xj));
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) *= inv_n;
  return r;
}

std::vector<std::complex<double>> naive_dft(std::span<const std::complex<double>> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -kTwoPi * static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
      acc += x[t] * std::polar(1.0, ang);
    }
    out[k] = acc;
  }
  return out;
}

double msdf_peak(const SampleStream& stream, double alpha_hz, int n_fft,
                 double resolution_hz, bool conjugate) {
  const std::size_t n = stream.data.size();
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0)
    throw ConfigError("ref::msdf_peak: n_fft must be a power of two >= 2");
  if (n < static_cast<std::size_t>(n_fft))
    throw ConfigError("ref::msdf_peak: stream shorter than one block");
  if (resolution_hz <= 0.0) throw ConfigError("ref::msdf_peak: resolution_hz must be > 0");

  std::size_t n_pad = static_cast<std::size_t>(n_fft);
  while (stream.sample_rate_hz / static_cast<double>(n_pad) > resolution_hz) n_pad <<= 1;

  const std::size_t blocks = n / static_cast<std::size_t>(n_fft);
  const double half_cycles = 0.5 * alpha_hz / stream.sample_rate_hz;

  std::vector<double> spectrum(n_pad, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<std::complex<double>> down(n_pad, 0.0), up(n_pad, 0.0);
    const std::size_t base = b * static_cast<std::size_t>(n_fft);
    for (int t = 0; t < n_fft; ++t) {
      const double ang =
          -kTwoPi * half_cycles * static_cast<double>(base + static_cast<std::size_t>(t));
      const auto rot = std::polar(1.0, ang);
      const auto x = stream.data[base + static_cast<std::size_t>(t)];
      down[static_cast<std::size_t>(t)] = x * rot;
      up[static_cast<std::size_t>(t)] = x * std::conj(rot);
    }
    const auto dspec = naive_dft(down);
    const auto uspec = naive_dft(up);
    if (conjugate) {
      for (std::size_t k = 0; k < n_pad; ++k)
        spectrum[k] += std::abs(dspec[k] * dspec[(n_pad - k) % n_pad]);
    } else {
      for (std::size_t k = 0; k < n_pad; ++k)
        spectrum[k] += std::abs(dspec[k] * std::conj(uspec[k]));
    }
  }

  double energy = 0.0;
  for (const auto& x : stream.data) energy += std::norm(x);
  energy /= static_cast<double>(n);
  if (energy == 0.0) return 0.0;

  const double scale =
      1.0 / (static_cast<double>(blocks) * static_cast<double>(n_fft) *
             static_cast<double>(n_fft) * energy);
  double peak = 0.0;
  for (const double s : spectrum) peak = std::max(peak, s * scale);
  return peak;
}

}  // namespace cyclosense::ref
