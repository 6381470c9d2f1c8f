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

#ifndef WTDIL_CPMAP_HPP
#define WTDIL_CPMAP_HPP

#include <functional>
#include <utility>
#include <vector>

#include "wtdil/algebra.hpp"

namespace wtdil {

/// Linear map between two block algebras, stored as a matrix from source
/// coordinates to target coordinates. The Choi matrix is assembled per source
/// block from its matrix units and cached together with the CP and unitality
/// flags.
struct CPMap {
  MatrixBlockAlgebra source;
  MatrixBlockAlgebra target;
  ComplexMatrix action;
  ComplexMatrix choi;
  double choi_min_eigenvalue = 0.0;
  double unital_residual = 0.0;
  bool is_cp = false;
  bool is_unital = false;
};

namespace detail {

// Target element as the direct sum of its blocks, without multiplicities.
inline ComplexMatrix compact(const AlgebraElement& x) {
  Eigen::Index n = 0;
  for (const auto& b : x.blocks()) n += b.rows();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : x.blocks()) {
    m.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return m;
}

}  // namespace detail

inline AlgebraElement apply(const CPMap& s, const AlgebraElement& a) {
  if (!(a.owner() == s.source)) {
    throw Error(ErrorKind::AlgebraMismatch, "apply: element is not in the source algebra");
  }
  return AlgebraElement::from_coordinates(s.target, s.action * a.coordinates());
}

/// Choi matrix direct sum over source blocks of sum_{u,v} E_uv (x) S(E_uv).
inline ComplexMatrix choi_matrix(const MatrixBlockAlgebra& source, const MatrixBlockAlgebra& target,
                                 const ComplexMatrix& action) {
  Eigen::Index nt = 0;
  for (const Block& b : target.blocks()) nt += b.dim;
  Eigen::Index total = 0;
  for (const Block& b : source.blocks()) total += b.dim * nt;
  ComplexMatrix c = ComplexMatrix::Zero(total, total);
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < source.num_blocks(); ++i) {
    const Eigen::Index d = source.blocks()[i].dim;
    for (Eigen::Index u = 0; u < d; ++u)
      for (Eigen::Index v = 0; v < d; ++v) {
        const Eigen::Index k = source.coord_offset(i) + u * d + v;
        const AlgebraElement image = AlgebraElement::from_coordinates(target, action.col(k));
        c.block(off + u * nt, off + v * nt, nt, nt) = detail::compact(image);
      }
    off += d * nt;
  }
  return c;
}

inline CPMap make_cpmap(const MatrixBlockAlgebra& source, const MatrixBlockAlgebra& target,
                        ComplexMatrix action, double tol = kDefaultTol) {
  if (action.rows() != target.coord_dim() || action.cols() != source.coord_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "make_cpmap: action has wrong shape");
  }
  require_finite(action, "make_cpmap");
  CPMap s{source, target, std::move(action), {}, 0.0, 0.0, false, false};

  const double scale = std::max(1.0, s.action.norm());
  for (std::size_t i = 0; i < source.num_blocks(); ++i) {
    const Eigen::Index d = source.blocks()[i].dim;
    for (Eigen::Index u = 0; u < d; ++u)
      for (Eigen::Index v = 0; v < d; ++v) {
        const Eigen::Index uv = source.coord_offset(i) + u * d + v;
        const Eigen::Index vu = source.coord_offset(i) + v * d + u;
        const AlgebraElement x = AlgebraElement::from_coordinates(target, s.action.col(uv));
        const AlgebraElement y = AlgebraElement::from_coordinates(target, s.action.col(vu));
        const double r = (x.adjoint().coordinates() - y.coordinates()).norm();
        if (r > tol * scale) {
          throw Error(ErrorKind::NotHermitianPreserving, "make_cpmap: S(a*) != S(a)*", r);
        }
      }
  }

  s.choi = choi_matrix(source, target, s.action);
  const ComplexMatrix herm = 0.5 * (s.choi + s.choi.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(herm, Eigen::EigenvaluesOnly);
  s.choi_min_eigenvalue = eig.eigenvalues().size() ? eig.eigenvalues()(0) : 0.0;
  const double choi_norm = eig.eigenvalues().size() ? eig.eigenvalues().cwiseAbs().maxCoeff() : 0.0;
  s.is_cp = s.choi_min_eigenvalue >= -tol * detail::safe_scale(choi_norm);

  const AlgebraElement one = apply(s, AlgebraElement::identity(source));
  s.unital_residual = (one.coordinates() - AlgebraElement::identity(target).coordinates()).norm();
  s.is_unital = s.unital_residual <= tol * std::max(1.0, one.coordinates().norm());
  return s;
}

/// Builds a map from a function returning ambient target matrices.
inline CPMap cpmap_from_function(const MatrixBlockAlgebra& source, const MatrixBlockAlgebra& target,
                                 const std::function<ComplexMatrix(const AlgebraElement&)>& fn,
                                 double tol = kDefaultTol, double membership_tol = kMembershipTol) {
  ComplexMatrix action(target.coord_dim(), source.coord_dim());
  for (Eigen::Index k = 0; k < source.coord_dim(); ++k) {
    action.col(k) = decompose(target, fn(AlgebraElement::basis(source, k)), membership_tol).coordinates();
  }
  return make_cpmap(source, target, std::move(action), tol);
}

inline CPMap identity_map(const MatrixBlockAlgebra& alg) {
  return make_cpmap(alg, alg, ComplexMatrix::Identity(alg.coord_dim(), alg.coord_dim()));
}

inline CPMap compose(const CPMap& second, const CPMap& first, double tol = kDefaultTol) {
  if (!(second.source == first.target)) {
    throw Error(ErrorKind::AlgebraMismatch, "compose: target of first != source of second");
  }
  return make_cpmap(first.source, second.target, second.action * first.action, tol);
}

inline CPMap scaled(const CPMap& s, double factor, double tol = kDefaultTol) {
  return make_cpmap(s.source, s.target, factor * s.action, tol);
}

/// max over coordinate basis a of |phi_f(a) - phi_g(S(a))|.
inline double covariance_residual(const CPMap& s, const VectorState& f, const VectorState& g) {
  if (f.dim() != s.source.ambient_dim() || g.dim() != s.target.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "check_covariance: state dimension mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.source.coord_dim(); ++k) {
    const AlgebraElement a = AlgebraElement::basis(s.source, k);
    const Complex lhs = f(represent(a));
    const Complex rhs = g(represent(apply(s, a)));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

inline bool check_covariance(const CPMap& s, const VectorState& f, const VectorState& g,
                             double tol = kMembershipTol) {
  return covariance_residual(s, f, g) <= tol;
}

/// Z(x) = sum_k A_k* x A_k with Kraus operators A_k : G -> F. The Stinespring
/// isometry xi : G -> F (x) L stacks the A_k with the L index slowest, so that
/// Z(x) = xi* (I_L (x) x) xi in that ordering.
struct KrausForm {
  Eigen::Index l_dim = 0;
  std::vector<ComplexMatrix> kraus_ops;
  ComplexMatrix stinespring;
};

inline ComplexMatrix stack_kraus(const std::vector<ComplexMatrix>& ops, Eigen::Index f_dim,
                                 Eigen::Index g_dim) {
  ComplexMatrix xi(f_dim * static_cast<Eigen::Index>(ops.size()), g_dim);
  for (std::size_t k = 0; k < ops.size(); ++k) xi.block(static_cast<Eigen::Index>(k) * f_dim, 0, f_dim, g_dim) = ops[k];
  return xi;
}

/// The map x -> xi* (I_L (x) x) xi between full algebras B(F) -> B(G).
inline CPMap cpmap_from_isometry(Eigen::Index f_dim, const ComplexMatrix& xi,
                                 double tol = kDefaultTol) {
  const Eigen::Index g_dim = xi.cols();
  const Eigen::Index l_dim = xi.rows() / f_dim;
  if (l_dim * f_dim != xi.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "cpmap_from_isometry: rows not a multiple of dim F");
  }
  const MatrixBlockAlgebra src = full_algebra(f_dim);
  const MatrixBlockAlgebra dst = full_algebra(g_dim);
  ComplexMatrix action = ComplexMatrix::Zero(g_dim * g_dim, f_dim * f_dim);
  for (Eigen::Index l = 0; l < l_dim; ++l) {
    const auto a = xi.block(l * f_dim, 0, f_dim, g_dim);
    for (Eigen::Index u = 0; u < f_dim; ++u)
      for (Eigen::Index v = 0; v < f_dim; ++v)
        for (Eigen::Index s = 0; s < g_dim; ++s)
          for (Eigen::Index t = 0; t < g_dim; ++t)
            action(s * g_dim + t, u * f_dim + v) += std::conj(a(u, s)) * a(v, t);
  }
  return make_cpmap(src, dst, std::move(action), tol);
}

inline KrausForm kraus_decomposition(const CPMap& z, double tol = kDefaultTol) {
  if (!z.source.is_full() || !z.target.is_full()) {
    throw Error(ErrorKind::NotFullAlgebra, "kraus_decomposition: source and target must be full");
  }
  if (!z.is_cp) {
    throw Error(ErrorKind::NotCP, "kraus_decomposition: Choi matrix is not PSD", z.choi_min_eigenvalue);
  }
  const Eigen::Index f_dim = z.source.ambient_dim();
  const Eigen::Index g_dim = z.target.ambient_dim();
  const HermitianEig eig = hermitian_eig(z.choi, std::max(tol, 1e-12));
  const double cutoff = tol * detail::safe_scale(std::abs(eig.eigenvalues(0)));
  KrausForm out;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    const double lambda = eig.eigenvalues(k);
    if (lambda <= cutoff) break;
    ComplexMatrix a(f_dim, g_dim);
    const double w = std::sqrt(lambda);
    for (Eigen::Index v = 0; v < f_dim; ++v)
      for (Eigen::Index t = 0; t < g_dim; ++t)
        a(v, t) = w * std::conj(eig.eigenvectors(v * g_dim + t, k));
    out.kraus_ops.push_back(std::move(a));
  }
  out.l_dim = static_cast<Eigen::Index>(out.kraus_ops.size());
  out.stinespring = stack_kraus(out.kraus_ops, f_dim, g_dim);
  return out;
}

}  // namespace wtdil

#endif  // WTDIL_CPMAP_HPP
