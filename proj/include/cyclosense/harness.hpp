// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cyclosense/detectors.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense {

enum class ExperimentKind {
  PfaVerify,
  StatisticHist,
  Roc,
  PdVsSnr,
  PdVsN,
  Interference,
  PdVsM,
};

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_string(std::string_view name);

// Declarative sweep description. Grids are sorted ascending during
// validation so cell (and therefore CSV row) order is lexicographic.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PdVsSnr;
  std::vector<DetectorId> detectors;
  std::vector<int> m = {2};
  std::vector<std::size_t> n = {4000};
  std::vector<double> snr_db = {-14.0};
  std::vector<double> sigma2 = {1.0};
  double pfa = 0.1;
  double rho = 0.0;
  std::vector<double> sir_db;                     // interference sweeps only
  std::vector<double> pfa_grid;                   // ROC threshold sweep
  int n_trials = 2000;
  int cal_trials = 5000;
  std::uint64_t master_seed = 1;
  SignalSpec soi;                                 // defaults to the BPSK source
  double interferer_offset_hz = 56e3;             // 30% main-lobe overlap
  CyclicFeature feature{160e3, true, 0};          // conjugate feature at 2 fc
  MsdfParams msdf;
  int hist_bins = 60;

  // Normalizes grids (sort + dedupe) and checks invariants; throws
  // ConfigError on violations.
  void validate();
};

// One Monte Carlo trial's outcome row.
struct TrialRecord {
  ExperimentKind kind;
  DetectorId detector;
  int m;
  std::size_t n;
  std::optional<double> snr_db;
  double rho;
  std::optional<double> sir_db;
  bool h1;  // hypothesis the frame was drawn under
  int trial;
  double statistic;
  double threshold;
  bool decision;
};

struct CellSummary {
  ExperimentKind kind;
  DetectorId detector;
  int m;
  std::size_t n;
  std::optional<double> snr_db;
  double rho;
  std::optional<double> sir_db;
  double pfa_target;
  double threshold;
  int trials;
  std::optional<double> pd, pd_lo, pd_hi;
  std::optional<double> pfa_emp, pfa_lo, pfa_hi;
};

struct HistRow {
  double bin_lo;
  double bin_hi;
  long count;
  double chi2_pdf_mid;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<CellSummary> summaries;
  std::vector<HistRow> histogram;  // statistic_hist only
  long undecidable = 0;
  std::vector<std::string> warnings;
};

// Runs every cell of the sweep: draws fresh channel and noise per trial,
// composes frames, evaluates each detector, and aggregates empirical Pd/Pfa
// with Wilson 95% intervals. Undecidable frames are re-drawn under a fresh
// sub-seed and counted; more than 1% in a cell raises a warning.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct Interval {
  double lo;
  double hi;
};

// Wilson score interval for a binomial proportion (95% by default).
Interval wilson_interval(long successes, long trials, double z = 1.959963984540054);

// CSV emission. Headers are fixed contracts:
//   summary: experiment,detector,M,N,snr_db,rho,sir_db,pfa_target,threshold,
//            trials,pd,pd_ci_lo,pd_ci_hi,pfa_emp,pfa_ci_lo,pfa_ci_hi
//   trials:  experiment,detector,M,N,snr_db,rho,sir_db,hypothesis,trial,
//            statistic,threshold,decision
//   hist:    bin_lo,bin_hi,count,chi2_pdf_at_midpoint
std::string summary_csv(const std::vector<CellSummary>& rows);
std::string trials_csv(const std::vector<TrialRecord>& rows);
std::string hist_csv(const std::vector<HistRow>& rows);

// Writes content to path, surfacing I/O failures with path context.
void emit_csv(const std::string& content, const std::filesystem::path& path);

}  // namespace cyclosense
