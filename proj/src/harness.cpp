// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "cyclosense/chi2.hpp"
#include "cyclosense/parallel.hpp"
#include "cyclosense/rng.hpp"

namespace cyclosense {

namespace {

constexpr std::uint64_t kPoolCal = 0x10;
constexpr std::uint64_t kPoolH0 = 0x20;
constexpr std::uint64_t kPoolH1 = 0x30;
constexpr int kMaxRedraws = 16;

std::uint64_t double_bits(double d) {
  std::uint64_t u = 0;
  std::memcpy(&u, &d, sizeof u);
  return u;
}

struct Cell {
  int m;
  std::size_t n;
  std::optional<double> snr_db;
  double sigma2;
  std::optional<double> sir_db;
};

std::uint64_t cell_seed(const ExperimentConfig& config, const Cell& cell) {
  std::uint64_t h = Rng::stream(config.master_seed,
                                static_cast<std::uint64_t>(config.kind) + 1).next_u64();
  h = Rng::stream(h, static_cast<std::uint64_t>(cell.m), cell.n).next_u64();
  h = Rng::stream(h, double_bits(cell.snr_db.value_or(-4000.0)),
                  double_bits(cell.sigma2)).next_u64();
  h = Rng::stream(h, double_bits(config.rho),
                  double_bits(cell.sir_db.value_or(-4000.0))).next_u64();
  return h;
}

// H1 frame: the SOI rides on top of the cell's H0 composite (noise plus any
// interferer), through the same seeded streams the H0 draw uses.
IQFrame draw_h1_frame(const H0Scenario& scenario, const SignalSpec& soi, double snr_db,
                      std::uint64_t seed) {
  const IQFrame background = draw_h0_frame(scenario, seed);
  const SampleStream stream =
      gen_bpsk(soi, scenario.num_samples, Rng::stream(seed, 5).next_u64());
  const ChannelRealization h =
      draw_rayleigh(scenario.num_antennas, Rng::stream(seed, 6).next_u64());
  return compose_frame(&stream, &h, nullptr, nullptr, background, scenario.noise, snr_db,
                       std::nullopt);
}

H0Scenario make_scenario(const ExperimentConfig& config, const Cell& cell) {
  H0Scenario s;
  s.num_antennas = cell.m;
  s.num_samples = cell.n;
  s.sample_rate_hz = config.soi.sample_rate_hz;
  s.noise.variance = cell.sigma2;
  s.noise.rho = config.rho;
  s.feature = config.feature;
  s.msdf = config.msdf;
  if (cell.sir_db) {
    SignalSpec interferer = config.soi;
    interferer.carrier_freq_hz += config.interferer_offset_hz;
    interferer.power = 1.0;
    s.interferer = interferer;
    s.snr_ref_db = cell.snr_db.value_or(0.0);
    s.sir_db = cell.sir_db;
  }
  return s;
}

// Pools of detector statistics for one cell, one pool per hypothesis.
struct CellStats {
  std::vector<std::vector<double>> h0;  // [detector][trial]
  std::vector<std::vector<double>> h1;
  long undecidable = 0;
};

CellStats run_cell(const ExperimentConfig& config, const Cell& cell,
                   const H0Scenario& scenario, bool want_h1, std::uint64_t key) {
  const auto n_det = config.detectors.size();
  const int trials = config.n_trials;

  CellStats stats;
  stats.h0.assign(n_det, std::vector<double>(static_cast<std::size_t>(trials)));
  if (want_h1) stats.h1.assign(n_det, std::vector<double>(static_cast<std::size_t>(trials)));

  long undecidable = 0;
  // exceptions must not unwind across the OpenMP region; capture and rethrow
  std::atomic<bool> failed{false};
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_count()) \
    reduction(+ : undecidable) if (!in_parallel_region())
  for (int trial = 0; trial < trials; ++trial) {
    if (failed.load(std::memory_order_relaxed)) continue;
    try {
      for (int pool = 0; pool < (want_h1 ? 2 : 1); ++pool) {
        const bool h1 = pool == 1;
        for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
          const std::uint64_t seed =
              Rng::stream(key, h1 ? kPoolH1 : kPoolH0, static_cast<std::uint64_t>(trial),
                          static_cast<std::uint64_t>(attempt)).next_u64();
          const IQFrame frame =
              h1 ? draw_h1_frame(scenario, config.soi, *cell.snr_db, seed)
                 : draw_h0_frame(scenario, seed);
          try {
            for (std::size_t d = 0; d < n_det; ++d) {
              const double value = detector_statistic(config.detectors[d], frame,
                                                      config.feature, config.msdf);
              (h1 ? stats.h1 : stats.h0)[d][static_cast<std::size_t>(trial)] = value;
            }
            break;
          } catch (const SingularMatrixError&) {
            // undecidable frame, re-draw under a fresh sub-seed
            ++undecidable;
            if (attempt == kMaxRedraws - 1) throw;
          }
        }
      }
    } catch (...) {
#pragma omp critical(cyclosense_cell_error)
      {
        if (!error) error = std::current_exception();
      }
      failed.store(true, std::memory_order_relaxed);
    }
  }
  if (error) std::rethrow_exception(error);

  stats.undecidable = undecidable;
  return stats;
}

double empirical_quantile(std::vector<double> sorted_pool, double q) {
  std::sort(sorted_pool.begin(), sorted_pool.end());
  const auto idx = static_cast<std::size_t>(
      std::floor(q * static_cast<double>(sorted_pool.size())));
  return sorted_pool[std::min(idx, sorted_pool.size() - 1)];
}

long count_above(const std::vector<double>& pool, double threshold) {
  long c = 0;
  for (const double v : pool) c += v > threshold ? 1 : 0;
  return c;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

void append_optional(std::string& out, const std::optional<double>& v) {
  if (v) append_double(out, *v);
}

template <typename T>
int cmp3(const T& a, const T& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

int cmp_opt(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a && !b) return 0;
  if (!a) return -1;
  if (!b) return 1;
  return cmp3(*a, *b);
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::PfaVerify: return "pfa_verify";
    case ExperimentKind::StatisticHist: return "statistic_hist";
    case ExperimentKind::Roc: return "roc";
    case ExperimentKind::PdVsSnr: return "pd_vs_snr";
    case ExperimentKind::PdVsN: return "pd_vs_n";
    case ExperimentKind::Interference: return "interference";
    case ExperimentKind::PdVsM: return "pd_vs_m";
  }
  return "unknown";
}

std::optional<ExperimentKind> experiment_from_string(std::string_view name) {
  std::string canon(name);
  std::replace(canon.begin(), canon.end(), '-', '_');
  if (canon == "pfa_verify") return ExperimentKind::PfaVerify;
  if (canon == "statistic_hist" || canon == "hist") return ExperimentKind::StatisticHist;
  if (canon == "roc") return ExperimentKind::Roc;
  if (canon == "pd_vs_snr") return ExperimentKind::PdVsSnr;
  if (canon == "pd_vs_n") return ExperimentKind::PdVsN;
  if (canon == "interference") return ExperimentKind::Interference;
  if (canon == "pd_vs_m") return ExperimentKind::PdVsM;
  return std::nullopt;
}

void ExperimentConfig::validate() {
  auto sort_unique = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  sort_unique(m);
  sort_unique(n);
  sort_unique(snr_db);
  sort_unique(sigma2);
  sort_unique(sir_db);
  sort_unique(pfa_grid);

  if (detectors.empty()) throw ConfigError("config: at least one detector required");
  if (m.empty() || n.empty() || snr_db.empty() || sigma2.empty())
    throw ConfigError("config: grids must be non-empty");
  for (const int antennas : m)
    if (antennas < 1) throw ConfigError("config: m must be >= 1");
  for (const auto samples : n)
    if (samples < 2) throw ConfigError("config: n must be >= 2");
  for (const double s2 : sigma2)
    if (s2 <= 0.0) throw ConfigError("config: sigma2 must be > 0");
  if (n_trials < 100) throw ConfigError("config: trials must be >= 100");
  if (cal_trials < 100) throw ConfigError("config: cal_trials must be >= 100");
  if (pfa <= 0.0 || pfa >= 1.0) throw ConfigError("config: pfa must be in (0, 1)");
  if (rho < 0.0 || rho > 1.0) throw ConfigError("config: rho must be in [0, 1]");
  soi.validate();
  if (std::abs(feature.alpha_hz) > soi.sample_rate_hz)
    throw ConfigError("config: cyclic frequency exceeds the sample rate");
  if (feature.lag_samples < 0) throw ConfigError("config: lag must be >= 0");

  if (msdf.n_fft < 2 || (msdf.n_fft & (msdf.n_fft - 1)) != 0)
    throw ConfigError("config: n_fft must be a power of two >= 2");
  const bool has_baseline = std::any_of(detectors.begin(), detectors.end(),
                                        [](DetectorId d) { return d != DetectorId::EvCss; });
  if (has_baseline && n.front() < static_cast<std::size_t>(msdf.n_fft))
    throw ConfigError("config: n must cover at least one n_fft block for the "
                      "spectral-correlation detectors");

  if (kind == ExperimentKind::Interference && sir_db.empty())
    throw ConfigError("config: interference experiment needs a sir_db grid");
  if (kind == ExperimentKind::Roc && pfa_grid.empty())
    throw ConfigError("config: roc experiment needs a pfa_grid");
  for (const double p : pfa_grid)
    if (p <= 0.0 || p >= 1.0) throw ConfigError("config: pfa_grid values must be in (0, 1)");
  if (kind == ExperimentKind::StatisticHist) {
    if (m.size() != 1 || n.size() != 1 || sigma2.size() != 1)
      throw ConfigError("config: hist runs one (m, n, sigma2) cell per invocation");
    if (detectors[0] != DetectorId::EvCss)
      throw ConfigError("config: hist describes the ev-css statistic");
  }
  if (hist_bins < 2) throw ConfigError("config: hist_bins must be >= 2");
}

Interval wilson_interval(long successes, long trials, double z) {
  const double nt = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2.0 * nt)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nt + z2 / (4.0 * nt * nt)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

ExperimentResult run_experiment(const ExperimentConfig& input) {
  ExperimentConfig config = input;
  config.validate();

  const bool h0_only = config.kind == ExperimentKind::PfaVerify ||
                       config.kind == ExperimentKind::StatisticHist;

  // Build the cell grid; grids that do not apply to this experiment collapse
  // to a single unset coordinate.
  std::vector<std::optional<double>> snr_axis;
  if (h0_only) {
    snr_axis = {std::nullopt};
  } else {
    for (const double s : config.snr_db) snr_axis.push_back(s);
  }
  std::vector<std::optional<double>> sir_axis;
  if (config.kind == ExperimentKind::Interference) {
    for (const double s : config.sir_db) sir_axis.push_back(s);
  } else {
    sir_axis = {std::nullopt};
  }

  std::vector<Cell> cells;
  for (const int m : config.m)
    for (const auto n : config.n)
      for (const auto& snr : snr_axis)
        for (const double s2 : config.sigma2)
          for (const auto& sir : sir_axis) cells.push_back({m, n, snr, s2, sir});

  ExperimentResult result;

  for (const auto& cell : cells) {
    const std::uint64_t key = cell_seed(config, cell);
    const H0Scenario scenario = make_scenario(config, cell);
    const bool want_h1 = !h0_only;

    // Thresholds. EV-CSS is analytic; baselines calibrate on a dedicated
    // H0 pool drawn under the cell's own environment. The ROC sweep keeps
    // the whole calibration pool so every pfa point reuses it.
    std::vector<double> thresholds(config.detectors.size(), 0.0);
    std::vector<std::vector<double>> baseline_cal(config.detectors.size());
    for (std::size_t d = 0; d < config.detectors.size(); ++d) {
      const DetectorId id = config.detectors[d];
      if (id == DetectorId::EvCss) {
        thresholds[d] = ev_css_threshold(cell.m, config.feature.conjugate, config.pfa);
      } else {
        const std::uint64_t cal_key = Rng::stream(key, kPoolCal).next_u64();
        if (config.kind == ExperimentKind::Roc) {
          std::vector<double> pool(static_cast<std::size_t>(config.cal_trials));
          std::atomic<bool> failed{false};
          std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8) num_threads(worker_count()) \
    if (!in_parallel_region())
          for (int t = 0; t < config.cal_trials; ++t) {
            if (failed.load(std::memory_order_relaxed)) continue;
            try {
              // same per-trial streams calibrate_threshold would use
              const std::uint64_t s =
                  Rng::stream(cal_key, 0x63616cull, static_cast<std::uint64_t>(t))
                      .next_u64();
              pool[static_cast<std::size_t>(t)] =
                  detector_statistic(id, draw_h0_frame(scenario, s), config.feature,
                                     config.msdf);
            } catch (...) {
#pragma omp critical(cyclosense_roc_error)
              {
                if (!error) error = std::current_exception();
              }
              failed.store(true, std::memory_order_relaxed);
            }
          }
          if (error) std::rethrow_exception(error);
          thresholds[d] = empirical_quantile(pool, 1.0 - config.pfa);
          baseline_cal[d] = std::move(pool);
        } else {
          thresholds[d] =
              calibrate_threshold(id, scenario, config.pfa, config.cal_trials, cal_key);
        }
      }
    }

    const CellStats stats = run_cell(config, cell, scenario, want_h1, key);
    result.undecidable += stats.undecidable;
    if (stats.undecidable >
        static_cast<long>(0.01 * config.n_trials * (want_h1 ? 2 : 1))) {
      std::string w = "cell m=" + std::to_string(cell.m) + " n=" + std::to_string(cell.n) +
                      ": " + std::to_string(stats.undecidable) + " undecidable frames (>1%)";
      result.warnings.push_back(std::move(w));
    }

    // Trial records at the cell threshold.
    for (std::size_t d = 0; d < config.detectors.size(); ++d) {
      for (int pool = 0; pool < (want_h1 ? 2 : 1); ++pool) {
        const auto& values = pool == 1 ? stats.h1[d] : stats.h0[d];
        for (int t = 0; t < config.n_trials; ++t) {
          const double v = values[static_cast<std::size_t>(t)];
          result.trials.push_back({config.kind, config.detectors[d], cell.m, cell.n,
                                   cell.snr_db, config.rho, cell.sir_db, pool == 1, t, v,
                                   thresholds[d], v > thresholds[d]});
        }
      }
    }

    // Summaries.
    auto make_summary = [&](std::size_t d, double pfa_target, double threshold) {
      CellSummary s;
      s.kind = config.kind;
      s.detector = config.detectors[d];
      s.m = cell.m;
      s.n = cell.n;
      s.snr_db = cell.snr_db;
      s.rho = config.rho;
      s.sir_db = cell.sir_db;
      s.pfa_target = pfa_target;
      s.threshold = threshold;
      s.trials = config.n_trials;
      const long fa = count_above(stats.h0[d], threshold);
      s.pfa_emp = static_cast<double>(fa) / config.n_trials;
      const auto fa_ci = wilson_interval(fa, config.n_trials);
      s.pfa_lo = fa_ci.lo;
      s.pfa_hi = fa_ci.hi;
      if (want_h1) {
        const long det = count_above(stats.h1[d], threshold);
        s.pd = static_cast<double>(det) / config.n_trials;
        const auto pd_ci = wilson_interval(det, config.n_trials);
        s.pd_lo = pd_ci.lo;
        s.pd_hi = pd_ci.hi;
      }
      return s;
    };

    for (std::size_t d = 0; d < config.detectors.size(); ++d) {
      if (config.kind == ExperimentKind::Roc) {
        for (const double p : config.pfa_grid) {
          const double threshold =
              config.detectors[d] == DetectorId::EvCss
                  ? ev_css_threshold(cell.m, config.feature.conjugate, p)
                  : empirical_quantile(baseline_cal[d], 1.0 - p);
          result.summaries.push_back(make_summary(d, p, threshold));
        }
      } else {
        result.summaries.push_back(make_summary(d, config.pfa, thresholds[d]));
      }
    }

    // Histogram of the first detector's H0 statistic against the asymptotic
    // density.
    if (config.kind == ExperimentKind::StatisticHist) {
      const auto& pool = stats.h0[0];
      const int dof = ccst_dof(cell.m, config.feature.conjugate);
      double hi = 0.0;
      for (const double v : pool) hi = std::max(hi, v);
      if (hi <= 0.0) hi = 1.0;
      const double width = hi / config.hist_bins;
      std::vector<long> counts(static_cast<std::size_t>(config.hist_bins), 0);
      for (const double v : pool) {
        auto bin = static_cast<std::size_t>(v / width);
        if (bin >= counts.size()) bin = counts.size() - 1;
        ++counts[bin];
      }
      for (int b = 0; b < config.hist_bins; ++b) {
        const double lo = b * width;
        result.histogram.push_back(
            {lo, lo + width, counts[static_cast<std::size_t>(b)],
             chi2_pdf(lo + 0.5 * width, dof)});
      }
    }
  }

  // Deterministic output order: lexicographic on the emitted columns.
  std::sort(result.summaries.begin(), result.summaries.end(),
            [](const CellSummary& a, const CellSummary& b) {
              if (int c = cmp3(to_string(a.detector), to_string(b.detector))) return c < 0;
              if (int c = cmp3(a.m, b.m)) return c < 0;
              if (int c = cmp3(a.n, b.n)) return c < 0;
              if (int c = cmp_opt(a.snr_db, b.snr_db)) return c < 0;
              if (int c = cmp_opt(a.sir_db, b.sir_db)) return c < 0;
              return a.pfa_target < b.pfa_target;
            });
  std::sort(result.trials.begin(), result.trials.end(),
            [](const TrialRecord& a, const TrialRecord& b) {
              if (int c = cmp3(to_string(a.detector), to_string(b.detector))) return c < 0;
              if (int c = cmp3(a.m, b.m)) return c < 0;
              if (int c = cmp3(a.n, b.n)) return c < 0;
              if (int c = cmp_opt(a.snr_db, b.snr_db)) return c < 0;
              if (int c = cmp_opt(a.sir_db, b.sir_db)) return c < 0;
              if (int c = cmp3(a.h1, b.h1)) return c < 0;
              return a.trial < b.trial;
            });
  return result;
}

std::string summary_csv(const std::vector<CellSummary>& rows) {
  std::string out =
      "experiment,detector,M,N,snr_db,rho,sir_db,pfa_target,threshold,trials,"
      "pd,pd_ci_lo,pd_ci_hi,pfa_emp,pfa_ci_lo,pfa_ci_hi\n";
  for (const auto& r : rows) {
    out += to_string(r.kind);
    out += ',';
    out += to_string(r.detector);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    append_optional(out, r.snr_db);
    out += ',';
    append_double(out, r.rho);
    out += ',';
    append_optional(out, r.sir_db);
    out += ',';
    append_double(out, r.pfa_target);
    out += ',';
    append_double(out, r.threshold);
    out += ',';
    out += std::to_string(r.trials);
    out += ',';
    append_optional(out, r.pd);
    out += ',';
    append_optional(out, r.pd_lo);
    out += ',';
    append_optional(out, r.pd_hi);
    out += ',';
    append_optional(out, r.pfa_emp);
    out += ',';
    append_optional(out, r.pfa_lo);
    out += ',';
    append_optional(out, r.pfa_hi);
    out += '\n';
  }
  return out;
}

std::string trials_csv(const std::vector<TrialRecord>& rows) {
  std::string out =
      "experiment,detector,M,N,snr_db,rho,sir_db,hypothesis,trial,statistic,threshold,"
      "decision\n";
  for (const auto& r : rows) {
    out += to_string(r.kind);
    out += ',';
    out += to_string(r.detector);
    out += ',';
    out += std::to_string(r.m);
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    append_optional(out, r.snr_db);
    out += ',';
    append_double(out, r.rho);
    out += ',';
    append_optional(out, r.sir_db);
    out += ',';
    out += r.h1 ? "H1" : "H0";
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    append_double(out, r.statistic);
    out += ',';
    append_double(out, r.threshold);
    out += ',';
    out += r.decision ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string hist_csv(const std::vector<HistRow>& rows) {
  std::string out = "bin_lo,bin_hi,count,chi2_pdf_at_midpoint\n";
  for (const auto& r : rows) {
    append_double(out, r.bin_lo);
    out += ',';
    append_double(out, r.bin_hi);
    out += ',';
    out += std::to_string(r.count);
    out += ',';
    append_double(out, r.chi2_pdf_mid);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::string& content, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace cyclosense
