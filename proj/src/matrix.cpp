// SPDX-License-Identifier: Apache-2.0
#include "cyclosense/matrix.hpp"

#include <cassert>

namespace cyclosense {

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  assert(a.cols() == b.rows());
  ComplexMatrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const auto aik = a(i, k);
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  ComplexMatrix r = a;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) += b(i, j);
  return r;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  ComplexMatrix r = a;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) -= b(i, j);
  return r;
}

ComplexMatrix operator*(ComplexMatrix::value_type s, const ComplexMatrix& a) {
  ComplexMatrix r = a;
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) r(i, j) *= s;
  return r;
}

}  // namespace cyclosense
