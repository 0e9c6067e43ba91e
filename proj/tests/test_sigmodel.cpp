// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "cyclosense/channel.hpp"
#include "cyclosense/ref.hpp"
#include "cyclosense/rng.hpp"
#include "cyclosense/sigmodel.hpp"

using namespace cyclosense;
using doctest::Approx;

namespace {

// The reference BPSK source used throughout: fc = 80 kHz, Tb = 25 us,
// fs = 320 kHz, so 8 samples per symbol and a conjugate feature at 160 kHz.
SignalSpec reference_spec() { return SignalSpec{}; }

IQFrame frame_from_stream(const SampleStream& s) {
  IQFrame f(1, s.data.size(), s.sample_rate_hz);
  std::copy(s.data.begin(), s.data.end(), f.samples.begin());
  return f;
}

double stream_cyclic_mag(const SampleStream& s, double alpha_hz, int lag, bool conjugate) {
  const auto m = ref::cyclic_cov(frame_from_stream(s), alpha_hz, lag, conjugate);
  return std::abs(m(0, 0));
}

}  // namespace

TEST_CASE("gen_bpsk oversampling and symbol structure") {
  const SignalSpec spec = reference_spec();
  CHECK(spec.samples_per_symbol() == 8);

  const SampleStream s = gen_bpsk(spec, 4000, 1);
  CHECK(s.size() == 4000);
  CHECK(s.sample_rate_hz == 320e3);

  // constant modulus: |s(n)|^2 == power everywhere for the rectangular pulse
  for (const auto& v : s.data) CHECK(std::norm(v) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("gen_bpsk zero power yields the zero stream") {
  SignalSpec spec = reference_spec();
  spec.power = 0.0;
  const SampleStream s = gen_bpsk(spec, 256, 9);
  for (const auto& v : s.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("gen_bpsk empirical power matches the spec") {
  SignalSpec spec = reference_spec();
  spec.power = 4.0;
  const SampleStream s = gen_bpsk(spec, 1000000, 5);
  double acc = 0.0;
  for (const auto& v : s.data) acc += std::norm(v);
  CHECK(acc / static_cast<double>(s.size()) == Approx(4.0).epsilon(0.05 / 4.0));
}

TEST_CASE("gen_bpsk rejects fractional oversampling") {
  SignalSpec spec = reference_spec();
  spec.symbol_period_s = 23e-6;  // 7.36 samples per symbol
  CHECK_THROWS_AS(gen_bpsk(spec, 100, 0), ConfigError);
  CHECK_THROWS_AS((void)spec.samples_per_symbol(), ConfigError);
}

TEST_CASE("gen_bpsk is deterministic per seed") {
  const SignalSpec spec = reference_spec();
  const SampleStream a = gen_bpsk(spec, 2048, 42);
  const SampleStream b = gen_bpsk(spec, 2048, 42);
  const SampleStream c = gen_bpsk(spec, 2048, 43);
  CHECK(a.data == b.data);
  CHECK(a.data != c.data);
}

TEST_CASE("cyclic feature catalog of rectangular BPSK") {
  const auto features = cyclic_features_bpsk(reference_spec());

  auto has = [&](double alpha, bool conj) {
    return std::any_of(features.begin(), features.end(), [&](const CyclicFeature& f) {
      return f.conjugate == conj && f.alpha_hz == Approx(alpha).epsilon(1e-12);
    });
  };

  CHECK(has(160e3, true));   // 2 fc
  CHECK(has(-160e3, true));
  CHECK(has(120e3, true));   // 2 fc - 1/Tb
  CHECK(has(200e3, true));   // 2 fc + 1/Tb
  CHECK(has(40e3, false));   // 1/Tb
  CHECK(has(-40e3, false));

  for (const auto& f : features) {
    CHECK(f.alpha_hz != 0.0);
    CHECK(std::abs(f.alpha_hz) <= 320e3);
  }
}

TEST_CASE("best_lag finds the documented lags") {
  const SignalSpec spec = reference_spec();

  const CyclicFeature conj_2fc{160e3, true, 0};
  CHECK(best_lag(spec, conj_2fc, 8, 1 << 18) == 0);
  CHECK(best_lag(spec, conj_2fc, 0, 1 << 14) == 0);  // single candidate

  // frozen from an exhaustive scan of the clean signal at N = 1e6: the
  // symbol-rate feature of the 8x oversampled signal peaks at half a symbol
  const CyclicFeature symbol_rate{40e3, false, 0};
  CHECK(best_lag(spec, symbol_rate, 16, 1 << 20) == 4);
}

TEST_CASE("conjugate feature dominates at 2fc while the plain one vanishes") {
  const SignalSpec spec = reference_spec();
  double conj_acc = 0.0, plain_acc = 0.0;
  for (std::uint64_t seed = 0; seed < 16; ++seed) {
    const SampleStream s = gen_bpsk(spec, 4000, 1000 + seed);
    conj_acc += stream_cyclic_mag(s, 160e3, 0, true);
    plain_acc += stream_cyclic_mag(s, 160e3, 0, false);
  }
  conj_acc /= 16.0;
  plain_acc /= 16.0;
  CHECK(conj_acc > 0.5 * spec.power);
  CHECK(plain_acc < 0.05 * spec.power);
}

TEST_CASE("clean BPSK conjugate correlation at (2fc, 0) equals the power") {
  // with the rectangular pulse the squared signal is a pure tone, so the
  // estimate is exact at every N
  const SampleStream s = gen_bpsk(reference_spec(), 4000, 3);
  CHECK(stream_cyclic_mag(s, 160e3, 0, true) == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("stationary noise has no cyclic feature") {
  Rng rng = Rng::stream(7);
  for (const std::size_t n : {std::size_t{4000}, std::size_t{64000}}) {
    SampleStream s;
    s.sample_rate_hz = 320e3;
    s.data.resize(n);
    for (auto& v : s.data) v = rng.next_cnormal();
    for (const double alpha : {40e3, 160e3}) {
      for (const bool conj : {false, true}) {
        // O(1/sqrt(N)) estimation noise, nothing more
        CHECK(stream_cyclic_mag(s, alpha, 0, conj) <
              5.0 / std::sqrt(static_cast<double>(n)));
      }
    }
  }
}
