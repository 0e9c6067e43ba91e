// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/chi2.hpp"

#include <cmath>
#include <limits>

#include "cyclosense/errors.hpp"

namespace cyclosense {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 500;

// Regularized lower incomplete gamma P(a, x) by power series; valid and
// fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction; valid for x >= a + 1.
double gamma_q_cf(double a, double x) {
  const double tiny = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (x <= 0.0) return 1.0;
  return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

void check_dof(int k) {
  if (k < 1) throw ConfigError("chi2: degrees of freedom must be >= 1");
}

}  // namespace

double chi2_pdf(double x, int k) {
  check_dof(k);
  if (x < 0.0) return 0.0;
  const double a = 0.5 * k;
  if (x == 0.0) return (k == 2) ? 0.5 : (k == 1 ? std::numeric_limits<double>::infinity() : 0.0);
  return std::exp((a - 1.0) * std::log(x) - 0.5 * x - a * std::log(2.0) - std::lgamma(a));
}

double chi2_cdf(double x, int k) {
  check_dof(k);
  if (x <= 0.0) return 0.0;
  return gamma_p(0.5 * k, 0.5 * x);
}

double chi2_sf(double x, int k) {
  check_dof(k);
  if (x <= 0.0) return 1.0;
  return gamma_q(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, int k) {
  check_dof(k);
  if (p < 0.0 || p >= 1.0) throw ConfigError("chi2_quantile: p must be in [0, 1)");
  if (p == 0.0) return 0.0;

  // Bracket, then bisect to near machine precision. The CDF is monotone, so
  // this is slow but certain; quantiles are computed once per configuration.
  double lo = 0.0;
  double hi = k + 10.0 * std::sqrt(2.0 * k) + 50.0;
  while (chi2_cdf(hi, k) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, k) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-13 * hi) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cyclosense
