// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "cyclosense/errors.hpp"
#include "cyclosense/matrix.hpp"

namespace cyclosense {

struct SvdResult {
  std::vector<double> singular_values;  // descending, >= 0
  ComplexMatrix left_vectors;           // U, unitary
  ComplexMatrix right_vectors;          // V, unitary; A = U diag(s) V^H
};

// SVD of a square complex matrix by one-sided Jacobi. Chosen for robustness
// on tiny matrices; at M <= 64 speed is irrelevant and the reconstruction
// contract (||U S V^H - A||_F <= 1e-10 ||A||_F) is what matters.
SvdResult svd(const ComplexMatrix& a);

// Solves A X = B by LU with partial pivoting (A square, B same row count).
// Throws SingularMatrixError when A is singular or the condition estimate
// exceeds 1e12.
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b);

// Lower-triangular L with L L^H = Toeplitz(rho^|i-j|), unit diagonal target.
// Requires 0 <= rho < 1 (the fully correlated case is handled upstream).
ComplexMatrix cholesky_toeplitz_rho(int m, double rho);

// Cholesky factor of a Hermitian positive definite matrix. Throws
// SingularMatrixError when a pivot is non-positive or the pivot spread says
// the matrix is numerically singular (condition beyond ~1e12).
ComplexMatrix cholesky_hermitian(const ComplexMatrix& a);

// X with L X = B for lower-triangular L.
ComplexMatrix solve_lower_triangular(const ComplexMatrix& l, const ComplexMatrix& b);

}  // namespace cyclosense
