// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyclosense/chi2.hpp"
#include "cyclosense/cli.hpp"
#include "cyclosense/config.hpp"
#include "cyclosense/harness.hpp"

using namespace cyclosense;
using doctest::Approx;

namespace {

// A cheap config for structural checks: tiny frames, minimum legal trials.
ExperimentConfig tiny_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.detectors = {DetectorId::EvCss};
  c.m = {2};
  c.n = {512};
  c.snr_db = {-6.0};
  c.sigma2 = {1.0};
  c.n_trials = 120;
  c.cal_trials = 100;
  c.master_seed = 9;
  return c;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("cyclosense");
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("flat config text parsing") {
  const auto kv = parse_config_text(
      "# comment line\n"
      "experiment = pd_vs_snr\n"
      "snr_db = -20:2:-16   # trailing comment\n"
      "trials=500\n"
      "\n");
  CHECK(kv.at("experiment") == "pd_vs_snr");
  CHECK(kv.at("snr_db") == "-20:2:-16");
  CHECK(kv.at("trials") == "500");
  CHECK(kv.size() == 3);

  CHECK_THROWS_AS(parse_config_text("just a line without equals\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("= value\n"), ConfigError);
}

TEST_CASE("double list parsing with range sugar") {
  CHECK(parse_double_list("1,2.5,-3") == std::vector<double>{1.0, 2.5, -3.0});
  const auto r = parse_double_list("-20:4:0");
  REQUIRE(r.size() == 6);
  CHECK(r.front() == -20.0);
  CHECK(r.back() == Approx(0.0));
  CHECK_THROWS_AS(parse_double_list("1:0:-5"), ConfigError);
  CHECK_THROWS_AS(parse_double_list("1,,2"), ConfigError);
  CHECK_THROWS_AS(parse_double_list("abc"), ConfigError);
}

TEST_CASE("apply_config maps every key") {
  ExperimentConfig c = tiny_config(ExperimentKind::PdVsSnr);
  KeyValues kv;
  kv["experiment"] = "interference";
  kv["detectors"] = "ev-css,bmrc-msdf";
  kv["m"] = "2,4";
  kv["n"] = "1000,4000";
  kv["snr_db"] = "-14";
  kv["sigma2"] = "1,10";
  kv["pfa"] = "0.05";
  kv["rho"] = "0.5";
  kv["sir_db"] = "-20:4:0";
  kv["trials"] = "250";
  kv["cal_trials"] = "300";
  kv["seed"] = "77";
  kv["n_fft"] = "256";
  kv["lag"] = "1";
  apply_config(c, kv);

  CHECK(c.kind == ExperimentKind::Interference);
  CHECK(c.detectors == std::vector<DetectorId>{DetectorId::EvCss, DetectorId::BmrcMsdf});
  CHECK(c.m == std::vector<int>{2, 4});
  CHECK(c.n == std::vector<std::size_t>{1000, 4000});
  CHECK(c.sigma2 == std::vector<double>{1.0, 10.0});
  CHECK(c.pfa == 0.05);
  CHECK(c.rho == 0.5);
  CHECK(c.sir_db.size() == 6);
  CHECK(c.n_trials == 250);
  CHECK(c.cal_trials == 300);
  CHECK(c.master_seed == 77);
  CHECK(c.msdf.n_fft == 256);
  CHECK(c.feature.lag_samples == 1);

  KeyValues bad;
  bad["not_a_key"] = "1";
  CHECK_THROWS_AS(apply_config(c, bad), ConfigError);
}

TEST_CASE("moving the carrier moves the default feature") {
  ExperimentConfig c = tiny_config(ExperimentKind::PdVsSnr);
  KeyValues kv;
  kv["carrier_freq_hz"] = "40000";
  apply_config(c, kv);
  CHECK(c.feature.alpha_hz == 80000.0);

  KeyValues pinned;
  pinned["carrier_freq_hz"] = "40000";
  pinned["alpha_hz"] = "160000";
  ExperimentConfig c2 = tiny_config(ExperimentKind::PdVsSnr);
  apply_config(c2, pinned);
  CHECK(c2.feature.alpha_hz == 160000.0);
}

TEST_CASE("config validation catches contract violations") {
  auto expect_throw = [](ExperimentConfig c) { CHECK_THROWS_AS(c.validate(), ConfigError); };

  ExperimentConfig ok = tiny_config(ExperimentKind::PdVsSnr);
  CHECK_NOTHROW(ok.validate());

  ExperimentConfig bad = tiny_config(ExperimentKind::PdVsSnr);
  bad.detectors.clear();
  expect_throw(bad);

  bad = tiny_config(ExperimentKind::PdVsSnr);
  bad.n_trials = 99;
  expect_throw(bad);

  bad = tiny_config(ExperimentKind::PdVsSnr);
  bad.pfa = 1.0;
  expect_throw(bad);

  bad = tiny_config(ExperimentKind::PdVsSnr);
  bad.rho = 1.5;
  expect_throw(bad);

  bad = tiny_config(ExperimentKind::Interference);
  bad.sir_db.clear();
  expect_throw(bad);

  bad = tiny_config(ExperimentKind::StatisticHist);
  bad.m = {2, 4};
  expect_throw(bad);

  // grids are normalized to sorted unique values
  ExperimentConfig dup = tiny_config(ExperimentKind::PdVsSnr);
  dup.snr_db = {0.0, -4.0, 0.0};
  dup.validate();
  CHECK(dup.snr_db == std::vector<double>{-4.0, 0.0});
}

TEST_CASE("wilson interval behaves at the edges") {
  const auto mid = wilson_interval(90, 1000);
  CHECK(mid.lo == Approx(0.0744).epsilon(0.01));
  CHECK(mid.hi == Approx(0.1083).epsilon(0.01));

  const auto zero = wilson_interval(0, 100);
  CHECK(zero.lo < 1e-15);
  CHECK(zero.hi > 0.0);
  CHECK(zero.hi < 0.05);

  const auto full = wilson_interval(100, 100);
  CHECK(full.hi == 1.0);
  CHECK(full.lo > 0.95);
}

TEST_CASE("pfa_verify produces H0-only summaries") {
  ExperimentConfig c = tiny_config(ExperimentKind::PfaVerify);
  c.sigma2 = {1.0, 10.0};
  const auto result = run_experiment(c);

  REQUIRE(result.summaries.size() == 2);
  for (const auto& s : result.summaries) {
    CHECK_FALSE(s.pd.has_value());
    CHECK(s.pfa_emp.has_value());
    CHECK(*s.pfa_emp >= 0.0);
    CHECK(*s.pfa_emp <= 0.35);
    CHECK_FALSE(s.snr_db.has_value());
    CHECK(s.threshold == ev_css_threshold(2, true, c.pfa));
  }
  CHECK(result.trials.size() == 2 * 120);
}

TEST_CASE("pd experiments fill both hypothesis pools") {
  ExperimentConfig c = tiny_config(ExperimentKind::PdVsSnr);
  c.detectors = {DetectorId::EvCss, DetectorId::SumMsdf};
  c.snr_db = {-20.0, 0.0};
  const auto result = run_experiment(c);

  REQUIRE(result.summaries.size() == 4);  // 2 detectors x 2 cells
  for (const auto& s : result.summaries) {
    CHECK(s.pd.has_value());
    CHECK(s.pfa_emp.has_value());
    CHECK(s.trials == 120);
  }
  CHECK(result.trials.size() == 2 * 2 * 2 * 120);
  for (const auto& r : result.trials) CHECK(r.decision == (r.statistic > r.threshold));

  // at 0 dB with N=512 everything detects essentially always
  for (const auto& s : result.summaries)
    if (*s.snr_db == 0.0 && s.detector == DetectorId::EvCss) CHECK(*s.pd > 0.9);
}

TEST_CASE("roc emits one row per detector per operating point") {
  ExperimentConfig c = tiny_config(ExperimentKind::Roc);
  c.detectors = {DetectorId::EvCss, DetectorId::SumMsdf};
  c.pfa_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  const auto result = run_experiment(c);

  CHECK(result.summaries.size() == 18);

  // ROC validity: along the grid both rates grow monotonically
  for (const auto id : c.detectors) {
    std::vector<const CellSummary*> rows;
    for (const auto& s : result.summaries)
      if (s.detector == id) rows.push_back(&s);
    REQUIRE(rows.size() == 9);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(rows[i]->pfa_target > rows[i - 1]->pfa_target);
      CHECK(*rows[i]->pd >= *rows[i - 1]->pd);
      CHECK(*rows[i]->pfa_emp >= *rows[i - 1]->pfa_emp);
    }
  }
}

TEST_CASE("hist bins cover the statistic pool and carry the reference density") {
  ExperimentConfig c = tiny_config(ExperimentKind::StatisticHist);
  c.hist_bins = 24;
  const auto result = run_experiment(c);

  REQUIRE(result.histogram.size() == 24);
  long total = 0;
  for (const auto& row : result.histogram) {
    total += row.count;
    CHECK(row.bin_hi > row.bin_lo);
    CHECK(row.chi2_pdf_mid ==
          Approx(chi2_pdf(0.5 * (row.bin_lo + row.bin_hi), 6)).epsilon(1e-12));
  }
  CHECK(total == 120);
}

TEST_CASE("fully correlated noise makes ev-css frames undecidable") {
  // rho = 1 replicates one stream to all antennas, so the covariance is
  // exactly singular; the engine re-draws a bounded number of times, then
  // surfaces the failure
  ExperimentConfig c = tiny_config(ExperimentKind::PfaVerify);
  c.rho = 1.0;
  CHECK_THROWS_AS(run_experiment(c), SingularMatrixError);

  // detectors that never invert the covariance are unaffected
  ExperimentConfig ok = tiny_config(ExperimentKind::PfaVerify);
  ok.rho = 1.0;
  ok.detectors = {DetectorId::SumMsdf};
  CHECK_NOTHROW(run_experiment(ok));

  // and the CLI reports it as a runtime failure, not a usage error
  CHECK(run_cli({"pfa-verify", "--m", "2", "--n", "512", "--rho", "1",
                 "--trials", "120"}) == 1);
}

TEST_CASE("experiments are deterministic end to end") {
  ExperimentConfig c = tiny_config(ExperimentKind::PdVsSnr);
  c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf};
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  CHECK(summary_csv(a.summaries) == summary_csv(b.summaries));
  CHECK(trials_csv(a.trials) == trials_csv(b.trials));
}

#ifdef _OPENMP
TEST_CASE("worker count does not change the output") {
  ExperimentConfig c = tiny_config(ExperimentKind::PdVsSnr);
  c.detectors = {DetectorId::EvCss, DetectorId::SumMsdf};

  omp_set_num_threads(1);
  const auto serial = run_experiment(c);
  omp_set_num_threads(4);
  const auto parallel = run_experiment(c);

  CHECK(summary_csv(serial.summaries) == summary_csv(parallel.summaries));
  CHECK(trials_csv(serial.trials) == trials_csv(parallel.trials));
}
#endif

TEST_CASE("csv headers are the documented contracts") {
  CHECK(summary_csv({}) ==
        "experiment,detector,M,N,snr_db,rho,sir_db,pfa_target,threshold,trials,"
        "pd,pd_ci_lo,pd_ci_hi,pfa_emp,pfa_ci_lo,pfa_ci_hi\n");
  CHECK(trials_csv({}) ==
        "experiment,detector,M,N,snr_db,rho,sir_db,hypothesis,trial,statistic,"
        "threshold,decision\n");
  CHECK(hist_csv({}) == "bin_lo,bin_hi,count,chi2_pdf_at_midpoint\n");
}

TEST_CASE("csv rows serialize optionals as empty fields") {
  CellSummary s{};
  s.kind = ExperimentKind::PfaVerify;
  s.detector = DetectorId::EvCss;
  s.m = 2;
  s.n = 4000;
  s.rho = 0.0;
  s.pfa_target = 0.1;
  s.threshold = 10.5;
  s.trials = 10;
  s.pfa_emp = 0.1;
  s.pfa_lo = 0.05;
  s.pfa_hi = 0.2;
  const std::string csv = summary_csv({s});
  CHECK(csv.find("pfa_verify,ev-css,2,4000,,0,,0.1,10.5,10,,,,0.1,0.05,0.2\n") !=
        std::string::npos);
}

TEST_CASE("emit_csv writes files and reports failures with context") {
  const auto path = std::filesystem::temp_directory_path() / "cyclosense_emit.csv";
  emit_csv("a,b\n1,2\n", path);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == "a,b\n1,2\n");
  std::filesystem::remove(path);

  CHECK_THROWS_WITH_AS(emit_csv("x", "/nonexistent-dir/x.csv"),
                       doctest::Contains("/nonexistent-dir/x.csv"), std::runtime_error);
}

TEST_CASE("cli usage and error exit codes") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"no-such-subcommand"}) == 2);
  CHECK(run_cli({"pd-vs-snr", "--no-such-flag", "1"}) == 2);
  CHECK(run_cli({"pd-vs-snr", "--pfa", "2.0", "--trials", "100"}) == 2);
  CHECK(run_cli({"calibrate"}) == 2);  // --detector is required
  CHECK(run_cli({"pd-vs-snr", "--config", "/does/not/exist.cfg"}) == 2);
}

TEST_CASE("cli runs a tiny experiment end to end") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "cyclosense_cli_summary.csv";
  const auto trials = dir / "cyclosense_cli_trials.csv";

  const int code = run_cli({"pfa-verify", "--m", "2", "--n", "512", "--sigma2", "1",
                            "--trials", "120", "--seed", "3", "--out", out.string(),
                            "--trial-out", trials.string()});
  CHECK(code == 0);

  std::ifstream sin(out);
  std::string header;
  std::getline(sin, header);
  CHECK(header ==
        "experiment,detector,M,N,snr_db,rho,sir_db,pfa_target,threshold,trials,"
        "pd,pd_ci_lo,pd_ci_hi,pfa_emp,pfa_ci_lo,pfa_ci_hi");
  int rows = 0;
  for (std::string line; std::getline(sin, line);) ++rows;
  CHECK(rows == 1);

  std::ifstream tin(trials);
  int trial_rows = -1;  // discount the header
  for (std::string line; std::getline(tin, line);) ++trial_rows;
  CHECK(trial_rows == 120);

  std::filesystem::remove(out);
  std::filesystem::remove(trials);
}

TEST_CASE("cli accepts a config file with flag overrides") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto cfg = dir / "cyclosense_test.cfg";
  const auto out = dir / "cyclosense_cfg_out.csv";
  {
    std::ofstream f(cfg);
    f << "# tiny smoke config\n"
         "detectors = ev-css\n"
         "m = 2\n"
         "n = 512\n"
         "snr_db = -4\n"
         "trials = 120\n"
         "seed = 5\n";
  }
  CHECK(run_cli({"pd-vs-snr", "--config", cfg.string(), "--trials", "130",
                 "--out", out.string()}) == 0);
  std::ifstream in(out);
  std::string header, row;
  std::getline(in, header);
  REQUIRE(std::getline(in, row));
  CHECK(row.find(",130,") != std::string::npos);  // the flag override won

  // unknown keys in the file are configuration errors
  {
    std::ofstream f(cfg);
    f << "bogus_key = 1\n";
  }
  CHECK(run_cli({"pd-vs-snr", "--config", cfg.string()}) == 2);

  std::filesystem::remove(cfg);
  std::filesystem::remove(out);
}

TEST_CASE("cli calibrate and feature-scan") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto out = dir / "cyclosense_cal.csv";
  CHECK(run_cli({"calibrate", "--detector", "ev-css", "--m", "2", "--n", "512",
                 "--cal-trials", "150", "--seed", "2", "--out", out.string()}) == 0);
  {
    std::ifstream in(out);
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "detector,M,N,rho,sigma2,pfa_target,trials,threshold");
    REQUIRE(std::getline(in, row));
    CHECK(row.rfind("ev-css,2,512,", 0) == 0);
  }
  std::filesystem::remove(out);

  CHECK(run_cli({"calibrate", "--detector", "nope"}) == 2);

  const auto scan = dir / "cyclosense_scan.csv";
  CHECK(run_cli({"feature-scan", "--max-lag", "4", "--n-probe", "16384",
                 "--out", scan.string()}) == 0);
  {
    std::ifstream in(scan);
    std::string header;
    std::getline(in, header);
    CHECK(header == "alpha_hz,conjugate,best_lag");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 8);  // 2 symbol-rate features + 6 conjugate ones
  }
  std::filesystem::remove(scan);
}
