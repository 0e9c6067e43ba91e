// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cyclosense/channel.hpp"
#include "cyclosense/cyclostat.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense {

enum class DetectorId { EvCss, SumMsdf, EgcMsdf, BmrcMsdf };

// Stable string identifiers used by the CLI and CSV outputs.
std::string_view to_string(DetectorId id);
std::optional<DetectorId> detector_from_string(std::string_view name);
std::span<const DetectorId> all_detectors();

struct EvCssConfig {
  CyclicFeature feature;
  double target_pfa = 0.1;
};

struct DetectionResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool decision = false;
  DetectorId detector = DetectorId::EvCss;
  std::vector<double> singular_values;  // canonical correlations, EV-CSS only
  int clamp_count = 0;                  // how many were clamped at the ceiling
};

struct CcstResult {
  double statistic = 0.0;
  std::vector<double> singular_values;  // clamped to [0, 1 - 1e-12]
  int clamp_count = 0;
};

// Degrees of freedom of the statistic's asymptotic chi-squared law:
// M^2 for the plain test, M(M+1) for the conjugate one.
int ccst_dof(int m, bool conjugate);

// Analytic CFAR threshold: the (1 - target_pfa) chi-squared quantile at
// ccst_dof(m, conjugate) degrees of freedom. Depends on nothing else --
// in particular not on sample count or noise power.
double ev_css_threshold(int m, bool conjugate, double target_pfa);

// Cyclic correlation significance statistic: with R the lagged covariance
// and C the cyclic covariance at the feature, the canonical correlations
// mu_i (eigenvalues of inv(R) C inv(R') C^H, computed as squared singular
// values of the Cholesky-whitened C; clamped to 1 - 1e-12) map to
// -N sum log(1 - mu_i). Scale-invariant and insensitive to spatial noise
// coloring by construction. Throws SingularMatrixError on an undecidable
// frame.
CcstResult ccst_statistic(const IQFrame& frame, const CyclicFeature& feature);

DetectionResult ev_css_detect(const IQFrame& frame, const EvCssConfig& config);

// Spectral-correlation baselines. Thresholds come from empirical H0
// calibration (calibrate_threshold below).
struct MsdfParams {
  int n_fft = 128;
  double resolution_hz = 0.0;  // 0 = sample_rate / 100
};

// Sum of per-antenna spectral-correlation peaks.
DetectionResult sum_msdf_detect(const IQFrame& frame, const CyclicFeature& feature,
                                double threshold, const MsdfParams& params = {});

// Equal-gain combining: co-phases the raw antenna streams using phase
// offsets estimated from per-antenna cyclic correlations, sums, then runs
// the spectral-correlation test on the combined stream.
DetectionResult egc_detect(const IQFrame& frame, const CyclicFeature& feature,
                           double threshold, const MsdfParams& params = {});

// Blind maximal-ratio combining: the dominant left singular vector of the
// cyclic covariance estimates the channel h; samples are combined as
// y(n) = h^H x(n) / ||h|| and the spectral-correlation test runs on y.
DetectionResult bmrc_msdf_detect(const IQFrame& frame, const CyclicFeature& feature,
                                 double threshold, const MsdfParams& params = {});

// Diagnostic only (not in the registry): maximal-ratio combining with the
// true channel, for comparing against the blind estimate.
DetectionResult mrc_csi_detect(const IQFrame& frame, const ChannelRealization& h,
                               const CyclicFeature& feature, double threshold,
                               const MsdfParams& params = {});

// EGC internals, exposed so tests can force unaligned combining.
std::vector<double> egc_phase_estimates(const IQFrame& frame, const CyclicFeature& feature);
SampleStream egc_combine(const IQFrame& frame, std::span<const double> phases);

// Blind channel estimate used by BMRC (unit norm, phase arbitrary).
ChannelRealization bmrc_channel_estimate(const IQFrame& frame, const CyclicFeature& feature);

// One statistic value for any detector, threshold-free (used by calibration
// and by ROC recording).
double detector_statistic(DetectorId id, const IQFrame& frame, const CyclicFeature& feature,
                          const MsdfParams& params = {});

// Generative description of an H0 environment for empirical calibration:
// noise, and optionally a co-channel interferer held at the power implied by
// (snr_ref_db, sir_db) relative to the absent SOI.
struct H0Scenario {
  int num_antennas = 2;
  std::size_t num_samples = 4000;
  double sample_rate_hz = 320e3;
  NoiseSpec noise;
  CyclicFeature feature;
  MsdfParams msdf;
  std::optional<SignalSpec> interferer;
  double snr_ref_db = 0.0;
  std::optional<double> sir_db;
};

// Empirical (1 - target_pfa) quantile of the detector statistic over
// n_trials freshly drawn H0 frames. Trials run in parallel with per-trial
// seed streams; the sorted reduction makes the result deterministic for a
// given seed regardless of worker count.
double calibrate_threshold(DetectorId id, const H0Scenario& scenario, double target_pfa,
                           int n_trials, std::uint64_t seed);

// Draws one H0 frame of the scenario (noise plus any interferer).
IQFrame draw_h0_frame(const H0Scenario& scenario, std::uint64_t seed);

}  // namespace cyclosense
