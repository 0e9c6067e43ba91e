// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cyclosense/config.hpp"
#include "cyclosense/harness.hpp"
#include "cyclosense/sigmodel.hpp"

namespace cyclosense {

namespace {

// Per-kind defaults mirroring the reference experiments; everything is
// overridable through a config file and flags.
ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::PfaVerify:
      c.detectors = {DetectorId::EvCss};
      c.m = {2, 4};
      c.sigma2 = {1.0, 10.0};
      c.n_trials = 10000;
      break;
    case ExperimentKind::StatisticHist:
      c.detectors = {DetectorId::EvCss};
      c.m = {2};
      c.sigma2 = {1.0};
      c.n_trials = 10000;
      break;
    case ExperimentKind::Roc:
      c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf, DetectorId::EgcMsdf,
                     DetectorId::SumMsdf};
      c.snr_db = {-14.0};
      c.pfa_grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
      break;
    case ExperimentKind::PdVsSnr:
      c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf, DetectorId::EgcMsdf,
                     DetectorId::SumMsdf};
      c.snr_db = {-20, -18, -16, -14, -12, -10, -8, -6, -4, -2, 0};
      break;
    case ExperimentKind::PdVsN:
      c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf, DetectorId::EgcMsdf,
                     DetectorId::SumMsdf};
      c.n = {500, 1000, 2000, 4000, 8000};
      c.snr_db = {-14.0};
      break;
    case ExperimentKind::Interference:
      c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf};
      c.snr_db = {0.0};
      c.sir_db = {-20, -16, -12, -8, -4, 0};
      break;
    case ExperimentKind::PdVsM:
      c.detectors = {DetectorId::EvCss, DetectorId::BmrcMsdf};
      c.m = {2, 3, 4};
      c.snr_db = {-14.0};
      break;
  }
  return c;
}

struct CommonArgs {
  std::string config_path;
  KeyValues overrides;
  std::string out_path;
  std::string trial_out_path;
};

// Every override flag funnels into the same key-value channel the config
// file uses, so flag and file semantics cannot drift apart.
void add_common_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "flat key = value config file");
  cmd->add_option("--out", args.out_path, "summary CSV destination");
  cmd->add_option("--trial-out", args.trial_out_path, "per-trial CSV destination");

  static const char* keys[] = {"detectors", "m", "n", "snr_db", "sigma2", "pfa",
                               "rho", "sir_db", "pfa_grid", "trials", "cal_trials",
                               "seed", "carrier_freq_hz", "symbol_period_s",
                               "sample_rate_hz", "power", "interferer_offset_hz",
                               "alpha_hz", "conjugate", "lag", "n_fft",
                               "resolution_hz", "hist_bins"};
  for (const char* key : keys) {
    std::string flag = "--" + std::string(key);
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.overrides[key] = v; },
        std::string("override config key ") + key);
  }
}

ExperimentConfig build_config(ExperimentKind kind, const CommonArgs& args) {
  ExperimentConfig config = default_config(kind);
  if (!args.config_path.empty()) {
    KeyValues kv = parse_config_file(args.config_path);
    kv.erase("out");        // destinations come from flags
    kv.erase("trial_out");
    apply_config(config, kv);
  }
  apply_config(config, args.overrides);
  config.kind = kind;  // the subcommand wins over any 'experiment' key
  return config;
}

int run_and_emit(ExperimentKind kind, const CommonArgs& args) {
  ExperimentConfig config = build_config(kind, args);
  const ExperimentResult result = run_experiment(config);

  for (const auto& warning : result.warnings) std::cerr << "warning: " << warning << "\n";

  const bool hist = kind == ExperimentKind::StatisticHist;
  const std::string main_csv =
      hist ? hist_csv(result.histogram) : summary_csv(result.summaries);
  if (args.out_path.empty()) {
    std::cout << main_csv;
  } else {
    emit_csv(main_csv, args.out_path);
    std::cout << (hist ? "histogram" : "summary") << " written to " << args.out_path << "\n";
  }
  if (!args.trial_out_path.empty()) {
    emit_csv(trials_csv(result.trials), args.trial_out_path);
    std::cout << "trials written to " << args.trial_out_path << "\n";
  }
  return 0;
}

int run_calibrate(const CommonArgs& args, const std::string& detector_name) {
  const auto id = detector_from_string(detector_name);
  if (!id) throw ConfigError("unknown detector '" + detector_name + "'");

  ExperimentConfig config = build_config(ExperimentKind::PdVsSnr, args);
  config.validate();

  H0Scenario scenario;
  scenario.num_antennas = config.m.front();
  scenario.num_samples = config.n.front();
  scenario.sample_rate_hz = config.soi.sample_rate_hz;
  scenario.noise.variance = config.sigma2.front();
  scenario.noise.rho = config.rho;
  scenario.feature = config.feature;
  scenario.msdf = config.msdf;
  if (!config.sir_db.empty()) {
    SignalSpec interferer = config.soi;
    interferer.carrier_freq_hz += config.interferer_offset_hz;
    scenario.interferer = interferer;
    scenario.snr_ref_db = config.snr_db.front();
    scenario.sir_db = config.sir_db.front();
  }

  const double threshold =
      calibrate_threshold(*id, scenario, config.pfa, config.cal_trials, config.master_seed);

  std::string csv = "detector,M,N,rho,sigma2,pfa_target,trials,threshold\n";
  char line[192];
  std::snprintf(line, sizeof line, "%s,%d,%zu,%g,%g,%g,%d,%.17g\n",
                std::string(to_string(*id)).c_str(), scenario.num_antennas,
                scenario.num_samples, config.rho, scenario.noise.variance, config.pfa,
                config.cal_trials, threshold);
  csv += line;
  if (args.out_path.empty()) {
    std::cout << csv;
  } else {
    emit_csv(csv, args.out_path);
  }
  return 0;
}

int run_feature_scan(const CommonArgs& args, int max_lag, long n_probe) {
  ExperimentConfig config = build_config(ExperimentKind::PdVsSnr, args);
  config.soi.validate();

  std::string csv = "alpha_hz,conjugate,best_lag\n";
  for (const auto& feature : cyclic_features_bpsk(config.soi)) {
    const int lag =
        best_lag(config.soi, feature, max_lag, static_cast<std::size_t>(n_probe));
    char line[96];
    std::snprintf(line, sizeof line, "%g,%d,%d\n", feature.alpha_hz,
                  feature.conjugate ? 1 : 0, lag);
    csv += line;
  }
  if (args.out_path.empty()) {
    std::cout << csv;
  } else {
    emit_csv(csv, args.out_path);
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"cyclosense: multi-antenna cyclostationary spectrum sensing simulator"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    ExperimentKind kind;
  };
  const Sub experiment_subs[] = {
      {"pfa-verify", "empirical false-alarm rate at the analytic threshold",
       ExperimentKind::PfaVerify},
      {"hist", "H0 statistic histogram against the asymptotic density",
       ExperimentKind::StatisticHist},
      {"roc", "ROC curves at a fixed operating point", ExperimentKind::Roc},
      {"pd-vs-snr", "detection probability across an SNR grid", ExperimentKind::PdVsSnr},
      {"pd-vs-n", "detection probability across sample counts", ExperimentKind::PdVsN},
      {"interference", "detection probability under a co-channel interferer",
       ExperimentKind::Interference},
      {"pd-vs-m", "detection probability across antenna counts", ExperimentKind::PdVsM},
  };

  std::vector<std::unique_ptr<CommonArgs>> arg_blocks;
  std::vector<std::pair<CLI::App*, ExperimentKind>> experiment_cmds;
  for (const auto& sub : experiment_subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    arg_blocks.push_back(std::make_unique<CommonArgs>());
    add_common_options(cmd, *arg_blocks.back());
    experiment_cmds.emplace_back(cmd, sub.kind);
  }

  auto cal_args = std::make_unique<CommonArgs>();
  std::string cal_detector;
  CLI::App* cal_cmd =
      app.add_subcommand("calibrate", "empirical H0 threshold for one detector");
  cal_cmd->add_option("--detector", cal_detector, "detector id")->required();
  add_common_options(cal_cmd, *cal_args);

  auto scan_args = std::make_unique<CommonArgs>();
  int scan_max_lag = 16;
  long scan_probe = 1 << 18;
  CLI::App* scan_cmd =
      app.add_subcommand("feature-scan", "catalog cyclic features and their best lags");
  scan_cmd->add_option("--max-lag", scan_max_lag, "largest lag to scan");
  scan_cmd->add_option("--n-probe", scan_probe, "probe signal length");
  add_common_options(scan_cmd, *scan_args);

  if (argc <= 1) {
    std::cerr << app.help() << std::flush;
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help() << std::flush;
    return 2;
  }

  try {
    for (std::size_t i = 0; i < experiment_cmds.size(); ++i)
      if (experiment_cmds[i].first->parsed())
        return run_and_emit(experiment_cmds[i].second, *arg_blocks[i]);
    if (cal_cmd->parsed()) return run_calibrate(*cal_args, cal_detector);
    if (scan_cmd->parsed()) return run_feature_scan(*scan_args, scan_max_lag, scan_probe);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cyclosense
