// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "cyclosense/matrix.hpp"
#include "cyclosense/rng.hpp"

// Shared oracle machinery for the test suites. Everything here is
// deliberately independent of the library's implementation paths: the
// integrator below never touches the incomplete gamma code, the KS helper is
// a direct ECDF comparison, and so on.

namespace testutil {

// Composite Simpson integration with fixed refinement; plenty for smooth
// densities on bounded intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int panels = 20000) {
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Chi-squared CDF by numeric quadrature of the density (log-space density to
// dodge overflow). Oracle for the analytic CDF/quantile implementation.
inline double chi2_cdf_by_quadrature(double x, int k) {
  if (x <= 0.0) return 0.0;
  const double a = 0.5 * k;
  auto pdf = [a, k](double t) {
    if (t <= 0.0) return k == 2 ? 0.5 : 0.0;  // dof 2 has a finite density at 0
    return std::exp((a - 1.0) * std::log(t) - 0.5 * t - a * std::log(2.0) - std::lgamma(a));
  };
  return simpson(pdf, 0.0, x);
}

// Quantile by bisection on the quadrature CDF.
inline double chi2_quantile_by_bisection(double p, int k) {
  double lo = 0.0, hi = 4.0 * k + 100.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (chi2_cdf_by_quadrature(mid, k) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Asymptotic KS critical value at significance alpha (valid for n >= 35).
inline double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-0.5 * std::log(alpha / 2.0) / static_cast<double>(n));
}

inline cyclosense::ComplexMatrix random_matrix(int rows, int cols, cyclosense::Rng& rng) {
  cyclosense::ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next_cnormal();
  return m;
}

inline double max_abs_diff(const cyclosense::ComplexMatrix& a,
                           const cyclosense::ComplexMatrix& b) {
  double d = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) d = std::max(d, std::abs(a(i, j) - b(i, j)));
  return d;
}

}  // namespace testutil
