// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace cyclosense {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: bad number '" + text + "' for key '" + key + "'");
  }
}

long long parse_int(const std::string& text, const std::string& key) {
  const double v = parse_double(text, key);
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9)
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + text + "'");
  return static_cast<long long>(r);
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config: bad boolean '" + text + "' for key '" + key + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

}  // namespace

KeyValues parse_config_text(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::stringstream ss{std::string(text)};
  std::string line;
  while (std::getline(ss, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key on line " + std::to_string(line_no));
    kv[key] = value;
  }
  return kv;
}

KeyValues parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::vector<double> parse_double_list(std::string_view text) {
  const std::string s = trim(text);
  if (s.empty()) return {};

  // range sugar lo:step:hi (inclusive)
  if (s.find(':') != std::string::npos) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ConfigError("config: range must be lo:step:hi, got '" + s + "'");
    const double lo = parse_double(parts[0], "range");
    const double step = parse_double(parts[1], "range");
    const double hi = parse_double(parts[2], "range");
    if (step <= 0.0) throw ConfigError("config: range step must be > 0");
    std::vector<double> out;
    for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
    return out;
  }

  std::vector<double> out;
  for (const auto& part : split(s, ',')) {
    if (part.empty()) throw ConfigError("config: empty list entry in '" + s + "'");
    out.push_back(parse_double(part, "list"));
  }
  return out;
}

void apply_config(ExperimentConfig& config, const KeyValues& kv) {
  bool soi_touched = false;
  bool alpha_given = false;

  for (const auto& [key, value] : kv) {
    if (key == "experiment") {
      const auto kind = experiment_from_string(value);
      if (!kind) throw ConfigError("config: unknown experiment '" + value + "'");
      config.kind = *kind;
    } else if (key == "detectors") {
      config.detectors.clear();
      for (const auto& name : split(value, ',')) {
        const auto id = detector_from_string(name);
        if (!id) throw ConfigError("config: unknown detector '" + name + "'");
        config.detectors.push_back(*id);
      }
    } else if (key == "m") {
      config.m.clear();
      for (const double v : parse_double_list(value)) {
        if (v < 1.0 || std::abs(v - std::round(v)) > 1e-9)
          throw ConfigError("config: m must be positive integers");
        config.m.push_back(static_cast<int>(std::llround(v)));
      }
    } else if (key == "n") {
      config.n.clear();
      for (const double v : parse_double_list(value)) {
        if (v < 1.0) throw ConfigError("config: n must be positive");
        config.n.push_back(static_cast<std::size_t>(std::llround(v)));
      }
    } else if (key == "snr_db") {
      config.snr_db = parse_double_list(value);
    } else if (key == "sigma2") {
      config.sigma2 = parse_double_list(value);
    } else if (key == "pfa") {
      config.pfa = parse_double(value, key);
    } else if (key == "rho") {
      config.rho = parse_double(value, key);
    } else if (key == "sir_db") {
      config.sir_db = parse_double_list(value);
    } else if (key == "pfa_grid") {
      config.pfa_grid = parse_double_list(value);
    } else if (key == "trials") {
      config.n_trials = static_cast<int>(parse_int(value, key));
    } else if (key == "cal_trials") {
      config.cal_trials = static_cast<int>(parse_int(value, key));
    } else if (key == "seed") {
      config.master_seed = static_cast<std::uint64_t>(parse_int(value, key));
    } else if (key == "carrier_freq_hz") {
      config.soi.carrier_freq_hz = parse_double(value, key);
      soi_touched = true;
    } else if (key == "symbol_period_s") {
      config.soi.symbol_period_s = parse_double(value, key);
    } else if (key == "sample_rate_hz") {
      config.soi.sample_rate_hz = parse_double(value, key);
    } else if (key == "power") {
      config.soi.power = parse_double(value, key);
    } else if (key == "interferer_offset_hz") {
      config.interferer_offset_hz = parse_double(value, key);
    } else if (key == "alpha_hz") {
      config.feature.alpha_hz = parse_double(value, key);
      alpha_given = true;
    } else if (key == "conjugate") {
      config.feature.conjugate = parse_bool(value, key);
    } else if (key == "lag") {
      config.feature.lag_samples = static_cast<int>(parse_int(value, key));
    } else if (key == "n_fft") {
      config.msdf.n_fft = static_cast<int>(parse_int(value, key));
    } else if (key == "resolution_hz") {
      config.msdf.resolution_hz = parse_double(value, key);
    } else if (key == "hist_bins") {
      config.hist_bins = static_cast<int>(parse_int(value, key));
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  // A moved carrier moves the default feature with it unless alpha_hz was
  // pinned explicitly.
  if (soi_touched && !alpha_given)
    config.feature.alpha_hz = 2.0 * config.soi.carrier_freq_hz;
}

}  // namespace cyclosense
