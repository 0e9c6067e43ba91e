// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/sigmodel.hpp"

#include <cmath>

#include "cyclosense/rng.hpp"

namespace cyclosense {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

int SignalSpec::samples_per_symbol() const {
  const double l = symbol_period_s * sample_rate_hz;
  const double rounded = std::round(l);
  if (rounded < 1.0 || std::abs(l - rounded) > 1e-9 * rounded)
    throw ConfigError("signal spec: symbol period must be an integer number of samples");
  return static_cast<int>(rounded);
}

void SignalSpec::validate() const {
  if (sample_rate_hz <= 0.0) throw ConfigError("signal spec: sample_rate_hz must be > 0");
  if (symbol_period_s <= 0.0) throw ConfigError("signal spec: symbol_period_s must be > 0");
  if (carrier_freq_hz < 0.0) throw ConfigError("signal spec: carrier_freq_hz must be >= 0");
  if (power < 0.0) throw ConfigError("signal spec: power must be >= 0");
  (void)samples_per_symbol();
}

SampleStream gen_bpsk(const SignalSpec& spec, std::size_t n_samples, std::uint64_t seed) {
  spec.validate();
  if (n_samples == 0) throw ConfigError("gen_bpsk: n_samples must be > 0");

  const int l = spec.samples_per_symbol();
  const double amp = std::sqrt(spec.power);
  const double w = kTwoPi * spec.carrier_freq_hz / spec.sample_rate_hz;  // rad per sample

  Rng rng = Rng::stream(seed, 0x62707331ull);  // bit stream
  SampleStream out;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.data.resize(n_samples);

  double symbol = 0.0;
  for (std::size_t n = 0; n < n_samples; ++n) {
    if (n % static_cast<std::size_t>(l) == 0)
      symbol = (rng.next_u64() & 1ull) ? 1.0 : -1.0;
    const double phase = w * static_cast<double>(n) + spec.initial_phase_rad;
    out.data[n] = amp * symbol * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return out;
}

std::vector<CyclicFeature> cyclic_features_bpsk(const SignalSpec& spec) {
  spec.validate();
  const double symbol_rate = 1.0 / spec.symbol_period_s;
  const double fc2 = 2.0 * spec.carrier_freq_hz;

  std::vector<CyclicFeature> features;
  auto add = [&](double alpha, bool conjugate) {
    if (alpha == 0.0) return;  // alpha = 0 is plain stationarity
    if (std::abs(alpha) > spec.sample_rate_hz) return;
    features.push_back({alpha, conjugate, 0});
  };
  for (int k = -1; k <= 1; ++k) {
    add(k * symbol_rate, false);
    add(fc2 + k * symbol_rate, true);
    add(-fc2 + k * symbol_rate, true);
  }
  return features;
}

int best_lag(const SignalSpec& spec, const CyclicFeature& feature, int max_lag,
             std::size_t n_probe) {
  if (max_lag < 0) throw ConfigError("best_lag: max_lag must be >= 0");
  if (max_lag == 0) return 0;

  // Offline calibration on a clean probe signal; fixed internal seed keeps
  // the answer stable across runs.
  const SampleStream probe = gen_bpsk(spec, n_probe, 0x6c616773ull);
  const double w = -kTwoPi * feature.alpha_hz / spec.sample_rate_hz;

  int best = 0;
  double best_mag = -1.0;
  for (int lag = 0; lag <= max_lag; ++lag) {
    std::complex<double> acc = 0.0;
    for (std::size_t n = static_cast<std::size_t>(lag); n < probe.data.size(); ++n) {
      const auto lagged = probe.data[n - static_cast<std::size_t>(lag)];
      const std::complex<double> rot(std::cos(w * static_cast<double>(n)),
                                     std::sin(w * static_cast<double>(n)));
      acc += probe.data[n] * (feature.conjugate ? lagged : std::conj(lagged)) * rot;
    }
    const double mag = std::abs(acc) / static_cast<double>(probe.data.size());
    if (mag > best_mag) {
      best_mag = mag;
      best = lag;
    }
  }
  return best;
}

}  // namespace cyclosense
