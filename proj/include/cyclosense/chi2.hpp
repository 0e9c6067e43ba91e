// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace cyclosense {

// Chi-squared distribution with k degrees of freedom, built on the
// regularized incomplete gamma function (series + continued fraction).
// No dependency on external statistics tables.

double chi2_pdf(double x, int k);

// CDF, absolute error <= 1e-10.
double chi2_cdf(double x, int k);

// Survival function 1 - CDF, absolute error <= 1e-10.
double chi2_sf(double x, int k);

// Inverse CDF: returns g with CDF(g) = p. Requires 0 <= p < 1.
double chi2_quantile(double p, int k);

}  // namespace cyclosense
