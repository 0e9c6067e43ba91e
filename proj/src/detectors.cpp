// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/detectors.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>

#include "cyclosense/chi2.hpp"
#include "cyclosense/linalg.hpp"
#include "cyclosense/parallel.hpp"
#include "cyclosense/rng.hpp"

namespace cyclosense {

namespace {

constexpr double kMuCeiling = 1.0 - 1e-12;
constexpr double kTwoPi = 6.283185307179586476925286766559;

constexpr std::array<DetectorId, 4> kRegistry = {
    DetectorId::EvCss, DetectorId::SumMsdf, DetectorId::EgcMsdf, DetectorId::BmrcMsdf};

double default_resolution(const MsdfParams& params, double sample_rate_hz) {
  return params.resolution_hz > 0.0 ? params.resolution_hz : sample_rate_hz / 100.0;
}

// Conjugate cyclic autocorrelation of a single stream at (alpha, lag); the
// phase reference for equal-gain combining.
std::complex<double> stream_cyclic_corr(std::span<const std::complex<double>> x,
                                        double sample_rate_hz, const CyclicFeature& feature) {
  const auto lag = static_cast<std::size_t>(feature.lag_samples);
  std::complex<double> acc = 0.0;
  for (std::size_t t = lag; t < x.size(); ++t) {
    const double ang = -kTwoPi * feature.alpha_hz / sample_rate_hz * static_cast<double>(t);
    const auto rot = std::polar(1.0, ang);
    const auto lagged = x[t - lag];
    acc += x[t] * (feature.conjugate ? lagged : std::conj(lagged)) * rot;
  }
  return acc / static_cast<double>(x.size());
}

}  // namespace

std::string_view to_string(DetectorId id) {
  switch (id) {
    case DetectorId::EvCss: return "ev-css";
    case DetectorId::SumMsdf: return "sum-msdf";
    case DetectorId::EgcMsdf: return "egc-msdf";
    case DetectorId::BmrcMsdf: return "bmrc-msdf";
  }
  return "unknown";
}

std::optional<DetectorId> detector_from_string(std::string_view name) {
  for (const auto id : kRegistry)
    if (to_string(id) == name) return id;
  return std::nullopt;
}

std::span<const DetectorId> all_detectors() { return kRegistry; }

int ccst_dof(int m, bool conjugate) { return conjugate ? m * (m + 1) : m * m; }

double ev_css_threshold(int m, bool conjugate, double target_pfa) {
  if (target_pfa <= 0.0 || target_pfa >= 1.0)
    throw ConfigError("ev_css_threshold: target_pfa must be in (0, 1)");
  return chi2_quantile(1.0 - target_pfa, ccst_dof(m, conjugate));
}

CcstResult ccst_statistic(const IQFrame& frame, const CyclicFeature& feature) {
  const auto pair = estimate_cov_pair(frame, feature);
  const int m = pair.cov.rows();

  // mu_i are the eigenvalues of inv(R) C inv(R') C^H (R' conjugated for the
  // conjugate test): the squared canonical correlations between the antenna
  // vector and its frequency-shifted lag image. They are computed stably as
  // squared singular values of the whitened cyclic covariance
  //   D = L^-1 C L^-T   (conjugate)   or   D = L^-1 C L^-H   (plain),
  // with R = L L^H, through two triangular solves. No matrix is inverted,
  // and the whitening cancels any spatial coloring of the noise exactly,
  // which is what keeps the false-alarm rate flat in rho and sigma^2.
  ComplexMatrix hermitian(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      hermitian(i, j) = 0.5 * (pair.cov(i, j) + std::conj(pair.cov(j, i)));

  const ComplexMatrix l = cholesky_hermitian(hermitian);
  const ComplexMatrix y = solve_lower_triangular(l, pair.cyc_cov);  // L y = C
  const ComplexMatrix z =
      solve_lower_triangular(l, feature.conjugate ? y.transpose() : y.adjoint());
  const ComplexMatrix whitened = feature.conjugate ? z.transpose() : z.adjoint();

  const auto decomposition = svd(whitened);

  CcstResult result;
  result.singular_values.reserve(decomposition.singular_values.size());
  double log_sum = 0.0;
  for (const double s : decomposition.singular_values) {
    double mu = s * s;
    if (mu > kMuCeiling) {
      mu = kMuCeiling;
      ++result.clamp_count;
      log_sum += std::log(1e-12);  // exact ceiling term, log1p would cancel
    } else {
      log_sum += std::log1p(-mu);
    }
    result.singular_values.push_back(mu);
  }
  result.statistic = -static_cast<double>(frame.num_samples) * log_sum;
  return result;
}

DetectionResult ev_css_detect(const IQFrame& frame, const EvCssConfig& config) {
  DetectionResult r;
  r.detector = DetectorId::EvCss;
  r.threshold = ev_css_threshold(frame.num_antennas, config.feature.conjugate,
                                 config.target_pfa);
  auto ccst = ccst_statistic(frame, config.feature);
  r.statistic = ccst.statistic;
  r.singular_values = std::move(ccst.singular_values);
  r.clamp_count = ccst.clamp_count;
  r.decision = r.statistic > r.threshold;
  return r;
}

DetectionResult sum_msdf_detect(const IQFrame& frame, const CyclicFeature& feature,
                                double threshold, const MsdfParams& params) {
  const double res = default_resolution(params, frame.sample_rate_hz);
  double statistic = 0.0;
  for (int k = 0; k < frame.num_antennas; ++k)
    statistic += msdf_peak(frame.antenna_stream(k), feature.alpha_hz, params.n_fft, res,
                           feature.conjugate);
  return {statistic, threshold, statistic > threshold, DetectorId::SumMsdf, {}, 0};
}

std::vector<double> egc_phase_estimates(const IQFrame& frame, const CyclicFeature& feature) {
  const int m = frame.num_antennas;
  std::vector<double> phases(m, 0.0);
  if (m < 2) return phases;

  if (feature.conjugate) {
    // The conjugate cyclic correlation of antenna k carries twice its channel
    // phase, so the half-angle difference aligns k with the reference
    // antenna. The half-angle is only known modulo pi; the ambiguity is
    // resolved greedily by whichever candidate makes the partially combined
    // stream's cyclic correlation largest.
    std::vector<std::complex<double>> corr(m);
    for (int k = 0; k < m; ++k)
      corr[k] = stream_cyclic_corr(frame.antenna(k), frame.sample_rate_hz, feature);

    const double ref = 0.5 * std::arg(corr[0]);
    std::vector<std::complex<double>> combined(frame.antenna(0).begin(),
                                               frame.antenna(0).end());
    for (int k = 1; k < m; ++k) {
      const double base = 0.5 * std::arg(corr[k]) - ref;
      double best_phase = base;
      double best_mag = -1.0;
      std::vector<std::complex<double>> trial(combined.size());
      for (const double candidate : {base, base + std::acos(-1.0)}) {
        const auto rot = std::polar(1.0, -candidate);
        const auto row = frame.antenna(k);
        for (std::size_t t = 0; t < trial.size(); ++t) trial[t] = combined[t] + rot * row[t];
        const double mag =
            std::abs(stream_cyclic_corr(trial, frame.sample_rate_hz, feature));
        if (mag > best_mag) {
          best_mag = mag;
          best_phase = candidate;
        }
      }
      phases[k] = best_phase;
      const auto rot = std::polar(1.0, -best_phase);
      const auto row = frame.antenna(k);
      for (std::size_t t = 0; t < combined.size(); ++t) combined[t] += rot * row[t];
    }
    return phases;
  }

  // Plain features: the cross cyclic correlation against the reference
  // antenna yields the phase difference directly.
  const auto lag = static_cast<std::size_t>(feature.lag_samples);
  const auto ref_row = frame.antenna(0);
  for (int k = 1; k < m; ++k) {
    const auto row = frame.antenna(k);
    std::complex<double> acc = 0.0;
    for (std::size_t t = lag; t < row.size(); ++t) {
      const double ang =
          -kTwoPi * feature.alpha_hz / frame.sample_rate_hz * static_cast<double>(t);
      acc += row[t] * std::conj(ref_row[t - lag]) * std::polar(1.0, ang);
    }
    phases[k] = std::arg(acc);
  }
  return phases;
}

SampleStream egc_combine(const IQFrame& frame, std::span<const double> phases) {
  if (static_cast<int>(phases.size()) != frame.num_antennas)
    throw ConfigError("egc_combine: one phase per antenna required");
  SampleStream out;
  out.sample_rate_hz = frame.sample_rate_hz;
  out.data.assign(frame.num_samples, 0.0);
  for (int k = 0; k < frame.num_antennas; ++k) {
    const auto rot = std::polar(1.0, -phases[k]);
    const auto row = frame.antenna(k);
    for (std::size_t t = 0; t < out.data.size(); ++t) out.data[t] += rot * row[t];
  }
  return out;
}

DetectionResult egc_detect(const IQFrame& frame, const CyclicFeature& feature,
                           double threshold, const MsdfParams& params) {
  const auto phases = egc_phase_estimates(frame, feature);
  const auto combined = egc_combine(frame, phases);
  const double res = default_resolution(params, frame.sample_rate_hz);
  const double statistic =
      msdf_peak(combined, feature.alpha_hz, params.n_fft, res, feature.conjugate);
  return {statistic, threshold, statistic > threshold, DetectorId::EgcMsdf, {}, 0};
}

ChannelRealization bmrc_channel_estimate(const IQFrame& frame, const CyclicFeature& feature) {
  const ComplexMatrix c =
      cyclic_cov(frame, feature.alpha_hz, feature.lag_samples, feature.conjugate);
  const auto decomposition = svd(c);
  ChannelRealization h;
  h.gains.resize(frame.num_antennas);
  for (int i = 0; i < frame.num_antennas; ++i) h.gains[i] = decomposition.left_vectors(i, 0);
  return h;
}

namespace {

DetectionResult mrc_combine_and_test(const IQFrame& frame, const ChannelRealization& h,
                                     const CyclicFeature& feature, double threshold,
                                     const MsdfParams& params, DetectorId id) {
  double norm = 0.0;
  for (const auto& g : h.gains) norm += std::norm(g);
  norm = std::sqrt(norm);
  if (norm == 0.0) throw ConfigError("mrc: zero channel estimate");

  SampleStream y;
  y.sample_rate_hz = frame.sample_rate_hz;
  y.data.assign(frame.num_samples, 0.0);
  for (int k = 0; k < frame.num_antennas; ++k) {
    const auto w = std::conj(h.gains[k]) / norm;  // y(n) = h^H x(n) / ||h||
    const auto row = frame.antenna(k);
    for (std::size_t t = 0; t < y.data.size(); ++t) y.data[t] += w * row[t];
  }
  const double res = default_resolution(params, frame.sample_rate_hz);
  const double statistic =
      msdf_peak(y, feature.alpha_hz, params.n_fft, res, feature.conjugate);
  return {statistic, threshold, statistic > threshold, id, {}, 0};
}

}  // namespace

DetectionResult bmrc_msdf_detect(const IQFrame& frame, const CyclicFeature& feature,
                                 double threshold, const MsdfParams& params) {
  const auto h = bmrc_channel_estimate(frame, feature);
  return mrc_combine_and_test(frame, h, feature, threshold, params, DetectorId::BmrcMsdf);
}

DetectionResult mrc_csi_detect(const IQFrame& frame, const ChannelRealization& h,
                               const CyclicFeature& feature, double threshold,
                               const MsdfParams& params) {
  return mrc_combine_and_test(frame, h, feature, threshold, params, DetectorId::BmrcMsdf);
}

double detector_statistic(DetectorId id, const IQFrame& frame, const CyclicFeature& feature,
                          const MsdfParams& params) {
  switch (id) {
    case DetectorId::EvCss: return ccst_statistic(frame, feature).statistic;
    case DetectorId::SumMsdf: return sum_msdf_detect(frame, feature, 0.0, params).statistic;
    case DetectorId::EgcMsdf: return egc_detect(frame, feature, 0.0, params).statistic;
    case DetectorId::BmrcMsdf: return bmrc_msdf_detect(frame, feature, 0.0, params).statistic;
  }
  throw ConfigError("detector_statistic: unknown detector");
}

IQFrame draw_h0_frame(const H0Scenario& scenario, std::uint64_t seed) {
  scenario.noise.validate();
  const std::uint64_t noise_seed = Rng::stream(seed, 1).next_u64();
  IQFrame noise =
      gen_noise(scenario.num_antennas, scenario.num_samples, scenario.noise, noise_seed);
  noise.sample_rate_hz = scenario.sample_rate_hz;
  if (!scenario.interferer) return noise;

  SignalSpec spec = *scenario.interferer;
  Rng phase_rng = Rng::stream(seed, 2);
  spec.initial_phase_rad = kTwoPi * phase_rng.next_double();
  const SampleStream stream =
      gen_bpsk(spec, scenario.num_samples, Rng::stream(seed, 3).next_u64());
  const ChannelRealization h =
      draw_rayleigh(scenario.num_antennas, Rng::stream(seed, 4).next_u64());
  return compose_frame(nullptr, nullptr, &stream, &h, noise, scenario.noise,
                       scenario.snr_ref_db, scenario.sir_db);
}

double calibrate_threshold(DetectorId id, const H0Scenario& scenario, double target_pfa,
                           int n_trials, std::uint64_t seed) {
  if (target_pfa <= 0.0 || target_pfa >= 1.0)
    throw ConfigError("calibrate_threshold: target_pfa must be in (0, 1)");
  if (n_trials < static_cast<int>(std::ceil(10.0 / target_pfa)))
    throw ConfigError("calibrate_threshold: too few trials for the requested pfa");

  std::vector<double> stats(static_cast<std::size_t>(n_trials));
  // exceptions must not unwind across the OpenMP region; capture and rethrow
  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_count()) \
    if (!in_parallel_region())
  for (int trial = 0; trial < n_trials; ++trial) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      const std::uint64_t trial_seed =
          Rng::stream(seed, 0x63616cull, static_cast<std::uint64_t>(trial)).next_u64();
      const IQFrame frame = draw_h0_frame(scenario, trial_seed);
      stats[static_cast<std::size_t>(trial)] =
          detector_statistic(id, frame, scenario.feature, scenario.msdf);
    } catch (...) {
#pragma omp critical(cyclosense_cal_error)
      {
        if (!error) error = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (error) std::rethrow_exception(error);

  std::sort(stats.begin(), stats.end());
  const auto idx = static_cast<std::size_t>(
      std::floor((1.0 - target_pfa) * static_cast<double>(n_trials)));
  return stats[std::min(idx, stats.size() - 1)];
}

}  // namespace cyclosense
