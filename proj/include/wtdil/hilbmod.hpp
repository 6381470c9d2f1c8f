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

// Concrete von Neumann modules. For a CP map S : A -> B with B acting on G,
// the GNS module E is realized inside B(G, H) where H is the Stinespring
// space; a module element x is the operator g -> x (.) g and the B-valued
// inner product is <x, y> = x* y.

#ifndef WTDIL_HILBMOD_HPP
#define WTDIL_HILBMOD_HPP

#include <optional>
#include <utility>
#include <vector>

#include "wtdil/cpmap.hpp"

namespace wtdil {

inline constexpr Eigen::Index kDefaultHilbertCap = 512;

struct GNSData {
  CPMap map;
  MatrixBlockAlgebra target_commutant;
  Eigen::Index h_dim = 0;
  std::vector<ComplexMatrix> rho;        // per source coordinate, on H
  std::vector<ComplexMatrix> rho_prime;  // per commutant coordinate, on H
  ComplexMatrix xi;                      // G -> H
  std::vector<ComplexMatrix> module_basis;

  const MatrixBlockAlgebra& source() const { return map.source; }
  const MatrixBlockAlgebra& target() const { return map.target; }
  Eigen::Index g_dim() const { return map.target.ambient_dim(); }

  ComplexMatrix rho_of(const AlgebraElement& a) const { return combine(rho, a); }
  ComplexMatrix rho_prime_of(const AlgebraElement& b) const { return combine(rho_prime, b); }

  /// The module element rho(a) xi b.
  ComplexMatrix element(const AlgebraElement& a, const AlgebraElement& b) const {
    return rho_of(a) * xi * represent(b);
  }

 private:
  ComplexMatrix combine(const std::vector<ComplexMatrix>& ops, const AlgebraElement& x) const {
    const ComplexVector c = x.coordinates();
    ComplexMatrix out = ComplexMatrix::Zero(h_dim, h_dim);
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (c(k) != Complex(0.0)) out += c(k) * ops[static_cast<std::size_t>(k)];
    return out;
  }
};

namespace detail {

// Greedy order-preserving selection of linearly independent operators.
inline std::vector<ComplexMatrix> independent_subset(const std::vector<ComplexMatrix>& candidates,
                                                     Eigen::Index max_rank, double tol) {
  std::vector<ComplexMatrix> kept;
  if (candidates.empty()) return kept;
  const Eigen::Index len = candidates.front().size();
  ComplexMatrix q(len, std::min<Eigen::Index>(max_rank, len));
  Eigen::Index rank = 0;
  for (const ComplexMatrix& x : candidates) {
    if (rank == q.cols()) break;
    ComplexVector v = Eigen::Map<const ComplexVector>(x.data(), len);
    const double norm0 = v.norm();
    if (norm0 == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      v -= q.leftCols(rank) * (q.leftCols(rank).adjoint() * v);
    }
    if (v.norm() > tol * norm0 * 1e2) {
      q.col(rank++) = v / v.norm();
      kept.push_back(x);
    }
  }
  return kept;
}

}  // namespace detail

/// Stinespring/GNS construction from the Gram matrix of {a (x) g} over the
/// coordinate basis of A and the standard basis of G.
inline GNSData gns(const CPMap& s, double tol = kDefaultTol,
                   Eigen::Index h_cap = kDefaultHilbertCap) {
  if (!s.is_cp) throw Error(ErrorKind::NotCP, "gns: map is not completely positive", s.choi_min_eigenvalue);
  const MatrixBlockAlgebra& a_alg = s.source;
  const MatrixBlockAlgebra& b_alg = s.target;
  const Eigen::Index na = a_alg.coord_dim();
  const Eigen::Index ng = b_alg.ambient_dim();
  const Eigen::Index n = na * ng;

  std::vector<AlgebraElement> basis;
  basis.reserve(static_cast<std::size_t>(na));
  for (Eigen::Index k = 0; k < na; ++k) basis.push_back(AlgebraElement::basis(a_alg, k));

  ComplexMatrix gram(n, n);
  for (Eigen::Index k = 0; k < na; ++k)
    for (Eigen::Index l = 0; l < na; ++l) {
      const ComplexMatrix v = represent(apply(s, basis[k].adjoint() * basis[l]));
      gram.block(k * ng, l * ng, ng, ng) = v;
    }

  const HermitianEig eig = hermitian_eig(gram, std::max(tol, 1e-12));
  const double top = std::max(0.0, eig.eigenvalues(0));
  Eigen::Index r = 0;
  while (r < n && eig.eigenvalues(r) > tol * detail::safe_scale(top)) ++r;
  if (r > h_cap) {
    throw Error(ErrorKind::DimensionCap, "gns: Stinespring dimension " + std::to_string(r) +
                                             " exceeds cap " + std::to_string(h_cap));
  }

  // Class map W : span{a (x) g} -> H with W* W = gram, and a right inverse.
  const RealVector lam = eig.eigenvalues.head(r);
  const ComplexMatrix vr = eig.eigenvectors.leftCols(r);
  const ComplexMatrix w = lam.cwiseSqrt().cast<Complex>().asDiagonal() * vr.adjoint();
  const ComplexMatrix w_inv = vr * lam.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal();

  GNSData out;
  out.map = s;
  out.target_commutant = commutant(b_alg);
  out.h_dim = r;

  // rho(a)[a' (x) g] = [a a' (x) g]
  out.rho.reserve(static_cast<std::size_t>(na));
  for (Eigen::Index k = 0; k < na; ++k) {
    const ComplexMatrix left = left_multiplication(basis[k]);
    ComplexMatrix lifted = ComplexMatrix::Zero(n, r);
    for (Eigen::Index p = 0; p < na; ++p)
      for (Eigen::Index q = 0; q < na; ++q)
        if (left(p, q) != Complex(0.0)) lifted.middleRows(p * ng, ng) += left(p, q) * w_inv.middleRows(q * ng, ng);
    out.rho.push_back(w * lifted);
  }

  // rho'(b')[a (x) g] = [a (x) b' g]
  const MatrixBlockAlgebra& bc = out.target_commutant;
  out.rho_prime.reserve(static_cast<std::size_t>(bc.coord_dim()));
  for (Eigen::Index k = 0; k < bc.coord_dim(); ++k) {
    const ComplexMatrix bp = represent_basis(bc, k);
    ComplexMatrix lifted(n, r);
    for (Eigen::Index p = 0; p < na; ++p) lifted.middleRows(p * ng, ng) = bp * w_inv.middleRows(p * ng, ng);
    out.rho_prime.push_back(w * lifted);
  }

  // xi g = [1 (x) g]
  const ComplexVector one = AlgebraElement::identity(a_alg).coordinates();
  out.xi = ComplexMatrix::Zero(r, ng);
  for (Eigen::Index k = 0; k < na; ++k)
    if (one(k) != Complex(0.0)) out.xi += one(k) * w.middleCols(k * ng, ng);

  // Generators rho(a) xi first, then rho(a) xi b over matrix units b.
  std::vector<ComplexMatrix> candidates;
  const Eigen::Index nb = b_alg.coord_dim();
  candidates.reserve(static_cast<std::size_t>(na * (nb + 1)));
  for (Eigen::Index k = 0; k < na; ++k) candidates.push_back(out.rho[k] * out.xi);
  for (Eigen::Index k = 0; k < na; ++k) {
    const ComplexMatrix rx = out.rho[k] * out.xi;
    for (Eigen::Index l = 0; l < nb; ++l) candidates.push_back(rx * represent_basis(b_alg, l));
  }
  out.module_basis = detail::independent_subset(candidates, r * ng, tol);
  return out;
}

struct GNSResiduals {
  double rho_homomorphism = 0.0;
  double rho_prime_homomorphism = 0.0;
  double commutation = 0.0;
  double stinespring = 0.0;  // max ||xi* rho(a) xi - S(a)||
  Eigen::Index cyclic_rank = 0;

  double max() const {
    return std::max({rho_homomorphism, rho_prime_homomorphism, commutation, stinespring});
  }
};

namespace detail {

inline double homomorphism_residual(const MatrixBlockAlgebra& alg, const std::vector<ComplexMatrix>& rep) {
  const Eigen::Index n = alg.coord_dim();
  const Eigen::Index h = rep.empty() ? 0 : rep.front().rows();
  auto lin = [&](const AlgebraElement& x) {
    const ComplexVector c = x.coordinates();
    ComplexMatrix out = ComplexMatrix::Zero(h, h);
    for (Eigen::Index k = 0; k < n; ++k)
      if (c(k) != Complex(0.0)) out += c(k) * rep[static_cast<std::size_t>(k)];
    return out;
  };
  double worst = residual(lin(AlgebraElement::identity(alg)), ComplexMatrix::Identity(h, h));
  for (Eigen::Index k = 0; k < n; ++k) {
    const AlgebraElement a = AlgebraElement::basis(alg, k);
    worst = std::max(worst, residual(lin(a.adjoint()), rep[k].adjoint()));
    for (Eigen::Index l = 0; l < n; ++l) {
      const AlgebraElement b = AlgebraElement::basis(alg, l);
      worst = std::max(worst, residual(lin(a * b), rep[k] * rep[l]));
    }
  }
  return worst;
}

}  // namespace detail

inline GNSResiduals gns_residuals(const GNSData& d, double tol = kDefaultTol) {
  GNSResiduals r;
  r.rho_homomorphism = detail::homomorphism_residual(d.source(), d.rho);
  r.rho_prime_homomorphism = detail::homomorphism_residual(d.target_commutant, d.rho_prime);
  for (const auto& x : d.rho)
    for (const auto& y : d.rho_prime) r.commutation = std::max(r.commutation, residual(x * y, y * x));
  ComplexMatrix span(d.h_dim, d.source().coord_dim() * d.g_dim());
  for (Eigen::Index k = 0; k < d.source().coord_dim(); ++k) {
    const ComplexMatrix sa = represent(apply(d.map, AlgebraElement::basis(d.source(), k)));
    r.stinespring = std::max(r.stinespring, residual(d.xi.adjoint() * d.rho[k] * d.xi, sa));
    span.middleCols(k * d.g_dim(), d.g_dim()) = d.rho[k] * d.xi;
  }
  r.cyclic_rank = numerical_rank(span, tol);
  return r;
}

/// <x, y> = x* y as an element of the target algebra.
inline AlgebraElement inner_product(const GNSData& d, const ComplexMatrix& x, const ComplexMatrix& y,
                                    double tol = kMembershipTol) {
  if (x.rows() != d.h_dim || y.rows() != d.h_dim || x.cols() != d.g_dim() || y.cols() != d.g_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "inner_product: operands are not maps G -> H");
  }
  const ComplexMatrix xy = x.adjoint() * y;
  Projection p = project(d.target(), xy);
  if (p.residual > tol * std::max(1.0, xy.norm())) {
    throw Error(ErrorKind::NotInTargetAlgebra, "inner_product: x* y is not in B", p.residual);
  }
  return std::move(p.element);
}

/// Orthonormal (Hilbert-Schmidt) basis of {x : rep(c) x = x c for all c in alg},
/// x : ambient(alg) -> H where rep is given on the coordinate basis of alg.
inline std::vector<ComplexMatrix> intertwiner_space(const std::vector<ComplexMatrix>& rep,
                                                    const MatrixBlockAlgebra& alg,
                                                    double tol = kDefaultTol) {
  if (rep.size() != static_cast<std::size_t>(alg.coord_dim())) {
    throw Error(ErrorKind::ShapeMismatch, "intertwiner_space: one operator per coordinate expected");
  }
  const Eigen::Index h = rep.front().rows();
  const Eigen::Index n = alg.ambient_dim();
  const Eigen::Index unknowns = h * n;
  // vec(R X - X C) = (I (x) R - C^T (x) I) vec(X), column-major vec.
  ComplexMatrix system(unknowns * alg.coord_dim(), unknowns);
  const ComplexMatrix ih = ComplexMatrix::Identity(h, h);
  const ComplexMatrix in = ComplexMatrix::Identity(n, n);
  for (Eigen::Index k = 0; k < alg.coord_dim(); ++k) {
    const ComplexMatrix c = represent_basis(alg, k);
    system.middleRows(k * unknowns, unknowns) = kron(in, rep[k]) - kron(c.transpose(), ih);
  }
  double scale = 1.0;
  for (const ComplexMatrix& r : rep) scale = std::max(scale, op_norm(r));
  const ComplexMatrix kernel = null_space(system, tol, scale);
  std::vector<ComplexMatrix> out;
  for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
    out.push_back(Eigen::Map<const ComplexMatrix>(kernel.col(k).data(), h, n));
  }
  return out;
}

struct ModulePolar {
  ComplexMatrix partial_isometry;  // x0
  AlgebraElement absolute;         // |x| = sqrt(<x, x>)
  AlgebraElement support;          // <x0, x0>
};

/// x = x0 |x| with <x0, x0> the support projection of <x, x>.
inline ModulePolar polar_decompose_module(const GNSData& d, const ComplexMatrix& x,
                                          double tol = kDefaultTol) {
  const AlgebraElement t = inner_product(d, x, x);
  const double scale = t.norm();
  AlgebraElement abs_x(d.target()), inv(d.target()), supp(d.target());
  for (std::size_t i = 0; i < t.blocks().size(); ++i) {
    const PsdFunctions fn = psd_functions(t.block(i), tol, scale);
    abs_x.block(i) = fn.sqrt;
    inv.block(i) = fn.pinv_sqrt;
    supp.block(i) = fn.support;
  }
  return {x * represent(inv), std::move(abs_x), std::move(supp)};
}

struct QonsElement {
  ComplexMatrix e;   // G -> H
  AlgebraElement p;  // <e, e>, a projection in B
};

struct QONS {
  std::vector<QonsElement> elements;
  ComplexMatrix completeness;  // sum e e*
  double completeness_residual = 0.0;
  bool complete = false;
};

/// Largest deviation from <e_i, e_j> = delta_ij p_i with p_i projections.
inline double qons_relation_residual(const GNSData& d, const std::vector<QonsElement>& q) {
  double worst = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const ComplexMatrix pi = represent(q[i].p);
    worst = std::max(worst, residual(pi * pi, pi));
    worst = std::max(worst, residual(pi.adjoint(), pi));
    for (std::size_t j = 0; j < q.size(); ++j) {
      const ComplexMatrix ij = q[i].e.adjoint() * q[j].e;
      worst = std::max(worst, i == j ? residual(ij, pi) : ij.norm());
    }
  }
  (void)d;
  return worst;
}

/// A module element given as sum_k rho(a_k) xi b_k.
struct ModuleTerm {
  AlgebraElement a;
  AlgebraElement b;
};
using ModuleElementSpec = std::vector<ModuleTerm>;

inline ComplexMatrix resolve(const GNSData& d, const ModuleElementSpec& spec) {
  ComplexMatrix x = ComplexMatrix::Zero(d.h_dim, d.g_dim());
  for (const ModuleTerm& t : spec) x += d.element(t.a, t.b);
  return x;
}

/// Completes a seed to a quasi-orthonormal system by module Gram-Schmidt over
/// the module basis. With no seed given, xi (or the partial isometry of its
/// polar decomposition when S is not unital) is used as the first element.
inline QONS qons(const GNSData& d, std::optional<std::vector<ComplexMatrix>> seed = std::nullopt,
                 double tol = kDefaultTol) {
  QONS out;
  const Eigen::Index h = d.h_dim;
  const ComplexMatrix ih = ComplexMatrix::Identity(h, h);
  if (!seed) {
    if (d.map.is_unital) {
      seed = std::vector<ComplexMatrix>{d.xi};
    } else {
      seed = std::vector<ComplexMatrix>{polar_decompose_module(d, d.xi, tol).partial_isometry};
    }
  }
  for (const ComplexMatrix& e : *seed) {
    if (e.rows() != h || e.cols() != d.g_dim()) {
      throw Error(ErrorKind::BadSeed, "qons: seed element is not a map G -> H");
    }
    AlgebraElement p(d.target());
    try {
      p = inner_product(d, e, e);
    } catch (const Error& err) {
      throw Error(ErrorKind::BadSeed, "qons: seed element is not in the module", err.residual());
    }
    out.elements.push_back({e, std::move(p)});
  }
  const double seed_res = qons_relation_residual(d, out.elements);
  if (seed_res > kMembershipTol) {
    throw Error(ErrorKind::BadSeed, "qons: seed violates <e_i, e_j> = delta_ij p_i", seed_res);
  }

  auto projector = [&] {
    ComplexMatrix p = ComplexMatrix::Zero(h, h);
    for (const auto& q : out.elements) p += q.e * q.e.adjoint();
    return p;
  };
  ComplexMatrix proj = projector();
  const double done_tol = 1e-9;
  // Support truncation can leave a direction behind; a second sweep picks it up.
  for (int sweep = 0; sweep < 3 && residual(proj, ih) > done_tol; ++sweep) {
    for (const ComplexMatrix& x : d.module_basis) {
      if (residual(proj, ih) <= done_tol) break;
      ComplexMatrix y = x;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : out.elements) y -= q.e * (q.e.adjoint() * y);
      }
      // ||<y, y>|| <= tol ||<x, x>||
      if (y.squaredNorm() <= tol * x.squaredNorm()) continue;
      ModulePolar polar = polar_decompose_module(d, y, tol);
      if (polar.support.norm() < 0.5) continue;
      out.elements.push_back({std::move(polar.partial_isometry), std::move(polar.support)});
      proj = projector();
    }
  }
  out.completeness = proj;
  out.completeness_residual = residual(proj, ih);
  out.complete = out.completeness_residual <= done_tol;
  return out;
}

/// Identification of the module with p_I (B (x) K), K spanned by one basis
/// vector per QONS element. U : H -> G (x) K stacks e_i* with K slowest.
struct ModuleEmbedding {
  Eigen::Index k_dim = 0;
  Eigen::Index k0_index = 0;
  ComplexMatrix unitary;  // U, (dim G * K) x dim H
  ComplexMatrix p_I;      // U U* = diag(p_i)
};

inline ModuleEmbedding embed_qons(const GNSData& d, const QONS& q) {
  if (!q.complete) {
    throw Error(ErrorKind::IncompleteQONS, "embed_qons: sum e_i e_i* != 1", q.completeness_residual);
  }
  const Eigen::Index ng = d.g_dim();
  ModuleEmbedding out;
  out.k_dim = static_cast<Eigen::Index>(q.elements.size());
  out.unitary.resize(ng * out.k_dim, d.h_dim);
  out.p_I = ComplexMatrix::Zero(ng * out.k_dim, ng * out.k_dim);
  for (Eigen::Index i = 0; i < out.k_dim; ++i) {
    const QonsElement& el = q.elements[static_cast<std::size_t>(i)];
    out.unitary.middleRows(i * ng, ng) = el.e.adjoint();
    out.p_I.block(i * ng, i * ng, ng, ng) = represent(el.p);
  }
  return out;
}

/// c_ji(a) = <e_j, a e_i>, the B-valued matrix entries of a on the embedding.
inline std::vector<AlgebraElement> coefficients(const GNSData& d, const QONS& q, const AlgebraElement& a,
                                                double tol = kMembershipTol) {
  const ComplexMatrix ra = d.rho_of(a);
  std::vector<AlgebraElement> out;
  for (const auto& ej : q.elements)
    for (const auto& ei : q.elements) out.push_back(inner_product(d, ej.e, ra * ei.e, tol));
  return out;
}

}  // namespace wtdil

#endif  // WTDIL_HILBMOD_HPP
