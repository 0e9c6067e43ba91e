// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/cyclostat.hpp"

#include <algorithm>
#include <cmath>

#include "cyclosense/fft.hpp"
#include "cyclosense/parallel.hpp"

namespace cyclosense {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::size_t kChunk = 1024;       // fixed reduction grid
constexpr std::size_t kPhaseRestart = 256; // bound recurrence drift

// Chunk boundaries depend only on the input size and partial sums are
// combined in chunk order, so the reduction is bit-identical for any number
// of OpenMP workers (and to a serial run of the same chunk loop).
std::size_t chunk_count(std::size_t total) { return (total + kChunk - 1) / kChunk; }

}  // namespace

ComplexMatrix cov_lag(const IQFrame& frame, int lag) {
  const int m = frame.num_antennas;
  const std::size_t n = frame.num_samples;
  if (lag < 0 || static_cast<std::size_t>(lag) >= n)
    throw ConfigError("cov_lag: lag must be in [0, N)");

  const std::size_t total = n - static_cast<std::size_t>(lag);
  const std::size_t chunks = chunk_count(total);
  std::vector<std::complex<double>> partial(chunks * m * m);

#pragma omp parallel for schedule(static) num_threads(worker_count()) \
    if (chunks > 1 && !in_parallel_region())
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    std::complex<double>* acc = partial.data() + static_cast<std::size_t>(c) * m * m;
    const std::size_t lo = static_cast<std::size_t>(lag) + c * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    for (std::size_t t = lo; t < hi; ++t) {
      for (int i = 0; i < m; ++i) {
        const auto xi = frame.at(i, t);
        for (int j = 0; j < m; ++j)
          acc[i * m + j] += xi * std::conj(frame.at(j, t - static_cast<std::size_t>(lag)));
      }
    }
  }

  ComplexMatrix r(m, m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < chunks; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r(i, j) += partial[c * m * m + i * m + j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) *= inv_n;
  return r;
}

ComplexMatrix cyclic_cov(const IQFrame& frame, double alpha_hz, int lag, bool conjugate) {
  // The alpha = 0 non-conjugate case must coincide with cov_lag exactly.
  if (alpha_hz == 0.0 && !conjugate) return cov_lag(frame, lag);

  const int m = frame.num_antennas;
  const std::size_t n = frame.num_samples;
  if (lag < 0 || static_cast<std::size_t>(lag) >= n)
    throw ConfigError("cyclic_cov: lag must be in [0, N)");

  const double cycles_per_sample = alpha_hz / frame.sample_rate_hz;
  const std::size_t total = n - static_cast<std::size_t>(lag);
  const std::size_t chunks = chunk_count(total);
  std::vector<std::complex<double>> partial(chunks * m * m);

  const double step = -kTwoPi * cycles_per_sample;
  const std::complex<double> dw(std::cos(step), std::sin(step));

#pragma omp parallel for schedule(static) num_threads(worker_count()) \
    if (chunks > 1 && !in_parallel_region())
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    std::complex<double>* acc = partial.data() + static_cast<std::size_t>(c) * m * m;
    const std::size_t lo = static_cast<std::size_t>(lag) + c * kChunk;
    const std::size_t hi = std::min(n, lo + kChunk);
    std::complex<double> w;
    for (std::size_t t = lo; t < hi; ++t) {
      // recompute the rotator at fixed intervals; in between, recurrence
      if ((t - lo) % kPhaseRestart == 0) {
        const double turns = cycles_per_sample * static_cast<double>(t);
        const double ang = -kTwoPi * (turns - std::floor(turns));
        w = {std::cos(ang), std::sin(ang)};
      } else {
        w *= dw;
      }
      for (int i = 0; i < m; ++i) {
        const auto xiw = frame.at(i, t) * w;
        const std::size_t tl = t - static_cast<std::size_t>(lag);
        for (int j = 0; j < m; ++j) {
          const auto xj = frame.at(j, tl);
          acc[i * m + j] += xiw * (conjugate ? xj : std::conj(xj));
        }
      }
    }
  }

  ComplexMatrix r(m, m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t c = 0; c < chunks; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) r(i, j) += partial[c * m * m + i * m + j];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) *= inv_n;
  return r;
}

CyclicCovPair estimate_cov_pair(const IQFrame& frame, const CyclicFeature& feature) {
  CyclicCovPair pair;
  pair.cov = cov_lag(frame, feature.lag_samples);
  pair.cyc_cov = cyclic_cov(frame, feature.alpha_hz, feature.lag_samples, feature.conjugate);
  pair.conjugate = feature.conjugate;
  pair.alpha_hz = feature.alpha_hz;
  pair.lag = feature.lag_samples;
  pair.n_used = frame.num_samples - static_cast<std::size_t>(feature.lag_samples);
  return pair;
}

double msdf_peak(const SampleStream& stream, double alpha_hz, int n_fft,
                 double resolution_hz, bool conjugate) {
  const std::size_t n = stream.data.size();
  if (n_fft < 2 || (n_fft & (n_fft - 1)) != 0)
    throw ConfigError("msdf_peak: n_fft must be a power of two >= 2");
  if (n < static_cast<std::size_t>(n_fft))
    throw ConfigError("msdf_peak: stream shorter than one block");
  if (resolution_hz <= 0.0) throw ConfigError("msdf_peak: resolution_hz must be > 0");

  // Zero-pad blocks when n_fft alone cannot hit the requested bin spacing.
  std::size_t n_pad = static_cast<std::size_t>(n_fft);
  while (stream.sample_rate_hz / static_cast<double>(n_pad) > resolution_hz) n_pad <<= 1;

  // Non-overlapping rectangular blocks, one FFT per sample of data; the
  // per-block cyclic periodograms are averaged in magnitude, so no phase
  // bookkeeping is needed across blocks at any cyclic frequency.
  const std::size_t blocks = n / static_cast<std::size_t>(n_fft);
  const double half_cycles = 0.5 * alpha_hz / stream.sample_rate_hz;  // (alpha/2) Ts

  const FftPlan plan(n_pad);

  // Per-block magnitudes are summed in block order after the parallel
  // section, keeping the result independent of worker count.
  std::vector<double> per_block(blocks * n_pad);

#pragma omp parallel for schedule(static) num_threads(worker_count()) \
    if (blocks > 1 && !in_parallel_region())
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    std::vector<std::complex<double>> down(n_pad, 0.0);
    std::vector<std::complex<double>> up;  // only the non-conjugate form needs it
    if (!conjugate) up.assign(n_pad, 0.0);

    const std::size_t base = static_cast<std::size_t>(b) * static_cast<std::size_t>(n_fft);
    for (int t = 0; t < n_fft; ++t) {
      const double turns = half_cycles * static_cast<double>(base + static_cast<std::size_t>(t));
      const double ang = -kTwoPi * (turns - std::floor(turns));
      const std::complex<double> rot(std::cos(ang), std::sin(ang));
      const auto x = stream.data[base + static_cast<std::size_t>(t)];
      down[static_cast<std::size_t>(t)] = x * rot;             // X(f + alpha/2) after FFT
      if (!conjugate) up[static_cast<std::size_t>(t)] = x * std::conj(rot);  // X(f - alpha/2)
    }
    plan.forward(down.data());
    if (!conjugate) plan.forward(up.data());

    double* out = per_block.data() + static_cast<std::size_t>(b) * n_pad;
    if (conjugate) {
      // X(alpha/2 + f_k) X(alpha/2 - f_k): the mirror bin of the same transform
      for (std::size_t k = 0; k < n_pad; ++k)
        out[k] = std::abs(down[k] * down[(n_pad - k) % n_pad]);
    } else {
      for (std::size_t k = 0; k < n_pad; ++k) out[k] = std::abs(down[k] * std::conj(up[k]));
    }
  }

  std::vector<double> spectrum(n_pad, 0.0);
  for (std::size_t b = 0; b < blocks; ++b)
    for (std::size_t k = 0; k < n_pad; ++k) spectrum[k] += per_block[b * n_pad + k];

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

}  // namespace cyclosense
