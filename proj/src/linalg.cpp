// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cyclosense {

namespace {

constexpr double kJacobiTol = 1e-15;   // relative column-orthogonality target
constexpr int kMaxSweeps = 64;
constexpr double kPivotFlagRatio = 1e10;   // cheap trigger for the SVD check
constexpr double kConditionLimit = 1e12;

// Gram-Schmidt completion of the columns of u marked as empty, drawing
// candidates from the canonical basis. Used for the null-space columns of U
// when A is rank deficient.
void complete_unitary(ComplexMatrix& u, std::vector<bool> filled) {
  const int n = u.rows();
  for (int col = 0; col < n; ++col) {
    if (filled[col]) continue;
    for (int cand = 0; cand < n; ++cand) {
      std::vector<std::complex<double>> v(n, 0.0);
      v[cand] = 1.0;
      // orthogonalize twice against everything already in place
      for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < n; ++c) {
          if (!filled[c]) continue;
          std::complex<double> proj = 0.0;
          for (int i = 0; i < n; ++i) proj += std::conj(u(i, c)) * v[i];
          for (int i = 0; i < n; ++i) v[i] -= proj * u(i, c);
        }
      }
      double norm = 0.0;
      for (const auto& x : v) norm += std::norm(x);
      norm = std::sqrt(norm);
      if (norm > 1e-3) {
        for (int i = 0; i < n; ++i) u(i, col) = v[i] / norm;
        filled[col] = true;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("svd: matrix must be square");
  const int n = a.rows();

  ComplexMatrix w = a;                         // working columns, becomes U * diag(s)
  ComplexMatrix v = ComplexMatrix::identity(n);

  // One-sided Jacobi: rotate column pairs of w until all pairs are
  // orthogonal. For a pair (p, q) the 2x2 Gram matrix is Hermitian; strip
  // the phase of the off-diagonal entry, then apply the classic symmetric
  // Jacobi rotation.
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0;
        std::complex<double> apq = 0.0;
        for (int i = 0; i < n; ++i) {
          app += std::norm(w(i, p));
          aqq += std::norm(w(i, q));
          apq += std::conj(w(i, p)) * w(i, q);
        }
        const double mag = std::abs(apq);
        if (mag <= kJacobiTol * std::sqrt(app * aqq) || mag == 0.0) continue;
        rotated = true;

        const std::complex<double> phase = apq / mag;  // e^{j phi}
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        // Columns [p q] <- [p q] * [[c, s], [-s conj(phase), c conj(phase)]]
        const std::complex<double> cp = c * std::conj(phase);
        const std::complex<double> sp = s * std::conj(phase);
        for (int i = 0; i < n; ++i) {
          const auto wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - sp * wq;
          w(i, q) = s * wp + cp * wq;
          const auto vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - sp * vq;
          v(i, q) = s * vp + cp * vq;
        }
      }
    }
    if (!rotated) break;
  }

  // Column norms are the singular values; normalized columns form U.
  std::vector<double> sigma(n);
  for (int j = 0; j < n; ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::norm(w(i, j));
    sigma[j] = std::sqrt(s);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return sigma[i] > sigma[j]; });

  const double smax = sigma.empty() ? 0.0 : sigma[order[0]];
  SvdResult result;
  result.singular_values.resize(n);
  result.left_vectors = ComplexMatrix(n, n);
  result.right_vectors = ComplexMatrix(n, n);
  std::vector<bool> filled(n, false);
  for (int j = 0; j < n; ++j) {
    const int src = order[j];
    result.singular_values[j] = sigma[src];
    for (int i = 0; i < n; ++i) result.right_vectors(i, j) = v(i, src);
    if (sigma[src] > smax * 1e-300 && sigma[src] > 0.0) {
      for (int i = 0; i < n; ++i) result.left_vectors(i, j) = w(i, src) / sigma[src];
      filled[j] = true;
    }
  }
  complete_unitary(result.left_vectors, filled);
  return result;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols()) throw ConfigError("solve_linear: A must be square");
  if (b.rows() != a.rows()) throw ConfigError("solve_linear: dimension mismatch");
  const int n = a.rows();

  ComplexMatrix lu = a;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  for (int k = 0; k < n; ++k) {
    int pivot = k;
    double best = std::abs(lu(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double m = std::abs(lu(i, k));
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (best == 0.0) throw SingularMatrixError("solve_linear: exactly singular matrix");
    if (pivot != k) {
      for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(pivot, j));
      std::swap(perm[k], perm[pivot]);
    }
    const auto inv_piv = 1.0 / lu(k, k);
    for (int i = k + 1; i < n; ++i) {
      const auto f = lu(i, k) * inv_piv;
      lu(i, k) = f;
      for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
    }
  }

  // Cheap condition screen on the pivot magnitudes; only when it trips do we
  // pay for singular values.
  double pmin = std::abs(lu(0, 0)), pmax = pmin;
  for (int k = 1; k < n; ++k) {
    const double p = std::abs(lu(k, k));
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  if (pmin == 0.0 || pmax / pmin > kPivotFlagRatio) {
    const auto s = svd(a).singular_values;
    const double smin = s.back(), smax = s.front();
    if (smin == 0.0 || smax / smin > kConditionLimit)
      throw SingularMatrixError("solve_linear: condition estimate exceeds 1e12");
  }

  ComplexMatrix x(n, b.cols());
  for (int col = 0; col < b.cols(); ++col) {
    // forward substitution on P b
    std::vector<std::complex<double>> y(n);
    for (int i = 0; i < n; ++i) {
      std::complex<double> acc = b(perm[i], col);
      for (int j = 0; j < i; ++j) acc -= lu(i, j) * y[j];
      y[i] = acc;
    }
    // back substitution
    for (int i = n - 1; i >= 0; --i) {
      std::complex<double> acc = y[i];
      for (int j = i + 1; j < n; ++j) acc -= lu(i, j) * x(j, col);
      x(i, col) = acc / lu(i, i);
    }
  }
  return x;
}

ComplexMatrix cholesky_hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw ConfigError("cholesky_hermitian: matrix must be square");
  const int n = a.rows();
  ComplexMatrix l(n, n);
  double dmin = 0.0, dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::complex<double> acc = a(i, j);
      for (int k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      if (i == j) {
        if (!(acc.real() > 0.0))
          throw SingularMatrixError("cholesky_hermitian: matrix is not positive definite");
        const double d = std::sqrt(acc.real());
        l(i, i) = d;
        dmin = (i == 0) ? d : std::min(dmin, d);
        dmax = std::max(dmax, d);
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  // pivot spread ~ sqrt of the condition number
  if (dmax / dmin > 1e6)
    throw SingularMatrixError("cholesky_hermitian: condition estimate exceeds 1e12");
  return l;
}

ComplexMatrix solve_lower_triangular(const ComplexMatrix& l, const ComplexMatrix& b) {
  if (l.rows() != l.cols() || b.rows() != l.rows())
    throw ConfigError("solve_lower_triangular: dimension mismatch");
  const int n = l.rows();
  ComplexMatrix x(n, b.cols());
  for (int col = 0; col < b.cols(); ++col) {
    for (int i = 0; i < n; ++i) {
      std::complex<double> acc = b(i, col);
      for (int k = 0; k < i; ++k) acc -= l(i, k) * x(k, col);
      x(i, col) = acc / l(i, i);
    }
  }
  return x;
}

ComplexMatrix cholesky_toeplitz_rho(int m, double rho) {
  if (m < 1) throw ConfigError("cholesky_toeplitz_rho: m must be >= 1");
  if (rho < 0.0 || rho >= 1.0)
    throw ConfigError("cholesky_toeplitz_rho: rho must be in [0, 1)");

  // Plain Cholesky of the SPD Toeplitz matrix rho^|i-j|.
  ComplexMatrix l(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      std::complex<double> acc = std::pow(rho, std::abs(i - j));
      for (int k = 0; k < j; ++k) acc -= l(i, k) * std::conj(l(j, k));
      if (i == j) {
        l(i, j) = std::sqrt(acc.real());
      } else {
        l(i, j) = acc / l(j, j);
      }
    }
  }
  return l;
}

}  // namespace cyclosense
