// Copyright 2026 The wtdil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra kernel. Every rank or positivity decision is
// made against an explicit tolerance that is relative to the operator norm
// of the input.

#ifndef WTDIL_NUMERICS_HPP
#define WTDIL_NUMERICS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "wtdil/error.hpp"

namespace wtdil {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;

namespace detail {

inline double safe_scale(double norm) { return norm > 0.0 ? norm : 1.0; }

// BDCSVD in Eigen 3.4.0 can lose all accuracy on complex input with clustered
// singular values; the one-sided Jacobi SVD does not.
using Svd = Eigen::JacobiSVD<Eigen::MatrixXcd>;

}  // namespace detail

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

inline void require_finite(const ComplexMatrix& m, const char* where) {
  if (!all_finite(m)) {
    throw Error(ErrorKind::NonFinite, std::string(where) + ": NaN or Inf entry");
  }
}

inline void require_square(const ComplexMatrix& m, const char* where) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::ShapeMismatch, std::string(where) + ": matrix is " +
                                              std::to_string(m.rows()) + "x" +
                                              std::to_string(m.cols()));
  }
}

/// Largest singular value.
inline double op_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  detail::Svd svd(m);
  return svd.singularValues()(0);
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline double residual(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).norm();
}

/// Rotates v by a global phase so that the first coordinate of (near-)largest
/// modulus is real and positive. Ties within 1e-12 relative resolve to the
/// lowest index.
inline void canonicalize_phase(Eigen::Ref<ComplexVector> v) {
  if (v.size() == 0) return;
  const double max_mod = v.cwiseAbs().maxCoeff();
  if (max_mod == 0.0) return;
  Eigen::Index pivot = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= max_mod * (1.0 - 1e-12)) {
      pivot = i;
      break;
    }
  }
  const Complex phase = std::conj(v(pivot)) / std::abs(v(pivot));
  v *= phase;
  v(pivot) = Complex(v(pivot).real(), 0.0);
}

struct HermitianEig {
  RealVector eigenvalues;     // descending
  ComplexMatrix eigenvectors;  // columns, unitary
};

inline HermitianEig hermitian_eig(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_square(m, "hermitian_eig");
  require_finite(m, "hermitian_eig");
  HermitianEig out;
  const Eigen::Index n = m.rows();
  if (n == 0) return out;
  const double scale = detail::safe_scale(op_norm(m));
  const double asym = (m - m.adjoint()).norm();
  if (asym > tol * scale) {
    throw Error(ErrorKind::NonHermitian,
                "hermitian_eig: ||M - M*|| exceeds tolerance", asym);
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    out.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    canonicalize_phase(out.eigenvectors.col(k));
  }
  return out;
}

struct PsdFunctions {
  ComplexMatrix sqrt;
  ComplexMatrix pinv_sqrt;
  ComplexMatrix support;
};

/// Square root, pseudo-inverse square root and support projection of a
/// positive semidefinite matrix. Eigenvalues at or below tol * scale are
/// treated as zero; scale defaults to the operator norm of m.
inline PsdFunctions psd_functions(const ComplexMatrix& m, double tol, double scale) {
  const HermitianEig eig = hermitian_eig(m, std::max(tol, 1e-12));
  const Eigen::Index n = m.rows();
  const double cutoff = tol * detail::safe_scale(scale);
  RealVector root = RealVector::Zero(n);
  RealVector inv_root = RealVector::Zero(n);
  RealVector keep = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda < -cutoff) {
      throw Error(ErrorKind::NotPSD, "psd_functions: negative eigenvalue", lambda);
    }
    if (lambda > cutoff) {
      root(k) = std::sqrt(lambda);
      inv_root(k) = 1.0 / root(k);
      keep(k) = 1.0;
    }
  }
  const ComplexMatrix& v = eig.eigenvectors;
  PsdFunctions out;
  out.sqrt = v * root.cast<Complex>().asDiagonal() * v.adjoint();
  out.pinv_sqrt = v * inv_root.cast<Complex>().asDiagonal() * v.adjoint();
  out.support = v * keep.cast<Complex>().asDiagonal() * v.adjoint();
  return out;
}

inline PsdFunctions psd_functions(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_square(m, "psd_functions");
  return psd_functions(m, tol, m.size() ? op_norm(m) : 1.0);
}

/// Number of singular values above tol * (largest singular value).
inline Eigen::Index numerical_rank(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_finite(m, "numerical_rank");
  if (m.size() == 0) return 0;
  detail::Svd svd(m);
  const RealVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * s(0)) ++r;
  return r;
}

/// Orthonormal basis of ker(m), one vector per column. Singular values at or
/// below tol * max(s_max, scale) count as zero; a positive scale keeps a matrix
/// that is pure rounding noise from being read as full rank.
inline ComplexMatrix null_space(const ComplexMatrix& m, double tol = kDefaultTol, double scale = 0.0) {
  require_finite(m, "null_space");
  const Eigen::Index cols = m.cols();
  if (m.rows() == 0) return ComplexMatrix::Identity(cols, cols);
  detail::Svd svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double ref = std::max(s.size() > 0 ? s(0) : 0.0, scale);
  if (ref > 0.0) {
    while (rank < s.size() && s(rank) > tol * ref) ++rank;
  }
  ComplexMatrix kernel = svd.matrixV().rightCols(cols - rank);
  for (Eigen::Index k = 0; k < kernel.cols(); ++k) canonicalize_phase(kernel.col(k));
  return kernel;
}

/// Orthonormal basis of the column space of m.
inline ComplexMatrix range_basis(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_finite(m, "range_basis");
  if (m.cols() == 0) return ComplexMatrix(m.rows(), 0);
  detail::Svd svd(m, Eigen::ComputeThinU);
  const RealVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    while (rank < s.size() && s(rank) > tol * s(0)) ++rank;
  }
  ComplexMatrix basis = svd.matrixU().leftCols(rank);
  for (Eigen::Index k = 0; k < basis.cols(); ++k) canonicalize_phase(basis.col(k));
  return basis;
}

/// Moore-Penrose pseudo-inverse; singular values <= tol * max are dropped.
inline ComplexMatrix pinv(const ComplexMatrix& m, double tol = kDefaultTol) {
  require_finite(m, "pinv");
  if (m.size() == 0) return ComplexMatrix::Zero(m.cols(), m.rows());
  detail::Svd svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& s = svd.singularValues();
  RealVector inv = RealVector::Zero(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(0) > 0.0 && s(k) > tol * s(0)) inv(k) = 1.0 / s(k);
  }
  return svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

struct LeastSquares {
  ComplexMatrix x;
  double residual = 0.0;  // ||A x - b||_F as achieved
};

/// Minimum-norm least-squares solution of A x = b.
inline LeastSquares solve_least_squares(const ComplexMatrix& a, const ComplexMatrix& b,
                                        double tol = kDefaultTol) {
  require_finite(a, "solve_least_squares");
  require_finite(b, "solve_least_squares");
  if (a.rows() != b.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "solve_least_squares: row count mismatch");
  }
  LeastSquares out;
  out.x = pinv(a, tol) * b;
  out.residual = (a * out.x - b).norm();
  return out;
}

}  // namespace wtdil

#endif  // WTDIL_NUMERICS_HPP
