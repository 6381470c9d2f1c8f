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

// Weak tensor dilations j : A -> B (x) B(K) with a vector state on K.
//
// The homomorphism is kept on the coordinate basis of A; each value is an
// operator on G (x) K with the K index slowest, so block (j, i) of j(a) is the
// B-valued matrix entry <e_j, a e_i>.

#ifndef WTDIL_DILATION_HPP
#define WTDIL_DILATION_HPP

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "wtdil/hilbmod.hpp"

namespace wtdil {

struct DilationCertificate {
  double multiplicativity = 0.0;   // max ||j(ab) - j(a) j(b)||
  double adjoint = 0.0;            // max ||j(a*) - j(a)*||
  double membership = 0.0;         // max distance of j(a) from B (x) B(K)
  double expectation = 0.0;        // max ||w P_psi(j(a)) w - S(a)||
  double projection = 0.0;         // ||j(1)^2 - j(1)|| + ||j(1) - j(1)*||

  double max() const { return std::max({multiplicativity, adjoint, membership, expectation, projection}); }
  bool passes(double tol) const { return max() <= tol; }
};

struct WeakTensorDilation {
  CPMap map;                      // the dilated map S : A -> B
  Eigen::Index k_dim = 0;
  ComplexVector state;            // unit vector k in K, psi = <k, . k>
  std::vector<ComplexMatrix> j;   // per source coordinate, on G (x) K
  ComplexMatrix p_I;              // j(1)
  AlgebraElement weight;          // |xi| in B; the identity for unital S
  std::shared_ptr<const GNSData> gns;   // set when built from a GNS module
  std::shared_ptr<const QONS> qons;
  DilationCertificate certificate;

  Eigen::Index space_dim() const { return map.target.ambient_dim() * k_dim; }

  ComplexMatrix j_of(const AlgebraElement& a) const {
    const ComplexVector c = a.coordinates();
    ComplexMatrix out = ComplexMatrix::Zero(space_dim(), space_dim());
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (c(k) != Complex(0.0)) out += c(k) * j[static_cast<std::size_t>(k)];
    return out;
  }

  ConditionalExpectation expectation() const {
    return ConditionalExpectation(map.target, k_dim, VectorState(state));
  }
};

inline DilationCertificate verify_dilation(const WeakTensorDilation& d) {
  DilationCertificate c;
  const MatrixBlockAlgebra& a_alg = d.map.source;
  const Eigen::Index na = a_alg.coord_dim();
  const ConditionalExpectation p_psi = d.expectation();
  const ComplexMatrix w = represent(d.weight);

  std::vector<AlgebraElement> basis;
  for (Eigen::Index k = 0; k < na; ++k) basis.push_back(AlgebraElement::basis(a_alg, k));

  for (Eigen::Index k = 0; k < na; ++k) {
    const ComplexMatrix& jk = d.j[static_cast<std::size_t>(k)];
    c.adjoint = std::max(c.adjoint, residual(d.j_of(basis[k].adjoint()), jk.adjoint()));
    c.membership = std::max(c.membership, project_tensor_k(d.map.target, d.k_dim, jk).residual);
    const ComplexMatrix sa = represent(apply(d.map, basis[k]));
    c.expectation = std::max(c.expectation, residual(w * p_psi.apply_ambient(jk) * w, sa));
    for (Eigen::Index l = 0; l < na; ++l) {
      const AlgebraElement prod = basis[k] * basis[l];
      c.multiplicativity =
          std::max(c.multiplicativity, residual(d.j_of(prod), jk * d.j[static_cast<std::size_t>(l)]));
    }
  }
  const ComplexMatrix one = d.j_of(AlgebraElement::identity(a_alg));
  c.projection = residual(one * one, one) + residual(one, one.adjoint());
  return c;
}

/// Assembles a dilation from explicit values on the coordinate basis.
inline WeakTensorDilation make_dilation(CPMap s, Eigen::Index k_dim, ComplexVector state,
                                        std::vector<ComplexMatrix> j_values) {
  if (j_values.size() != static_cast<std::size_t>(s.source.coord_dim())) {
    throw Error(ErrorKind::ShapeMismatch, "make_dilation: one value per source coordinate expected");
  }
  const Eigen::Index n = s.target.ambient_dim() * k_dim;
  for (const auto& m : j_values) {
    if (m.rows() != n || m.cols() != n) {
      throw Error(ErrorKind::ShapeMismatch, "make_dilation: value has wrong size");
    }
  }
  WeakTensorDilation d;
  d.weight = AlgebraElement::identity(s.target);
  d.map = std::move(s);
  d.k_dim = k_dim;
  d.state = std::move(state);
  d.j = std::move(j_values);
  d.p_I = d.j_of(AlgebraElement::identity(d.map.source));
  d.certificate = verify_dilation(d);
  return d;
}

namespace detail {

inline WeakTensorDilation dilation_from_qons(std::shared_ptr<const GNSData> g, QONS q,
                                             AlgebraElement weight) {
  const ModuleEmbedding emb = embed_qons(*g, q);
  std::vector<ComplexMatrix> values;
  values.reserve(g->rho.size());
  for (const auto& r : g->rho) values.push_back(emb.unitary * r * emb.unitary.adjoint());

  WeakTensorDilation d;
  d.map = g->map;
  d.k_dim = emb.k_dim;
  d.state = basis_vector(emb.k_dim, emb.k0_index);
  d.j = std::move(values);
  d.p_I = emb.p_I;
  d.weight = std::move(weight);
  d.gns = std::move(g);
  d.qons = std::make_shared<const QONS>(std::move(q));
  d.certificate = verify_dilation(d);
  return d;
}

}  // namespace detail

/// GNS module, a complete quasi-orthonormal system containing xi = e_0, and
/// j(a) = sum_{j,i} <e_j, a e_i> (x) |k_j><k_i| with psi the state of k_0.
/// A seed, when given, lists the leading QONS elements (xi first) as module
/// elements sum rho(a) xi b; the rest is completed by module Gram-Schmidt.
inline WeakTensorDilation weak_tensor_dilation(const CPMap& s,
                                               const std::optional<std::vector<ModuleElementSpec>>& seed = std::nullopt,
                                               double tol = kDefaultTol) {
  if (!s.is_cp) throw Error(ErrorKind::NotCP, "weak_tensor_dilation: map is not CP", s.choi_min_eigenvalue);
  if (!s.is_unital) {
    throw Error(ErrorKind::NotUnital, "weak_tensor_dilation: map is not unital", s.unital_residual);
  }
  auto g = std::make_shared<const GNSData>(gns(s, tol));
  std::optional<std::vector<ComplexMatrix>> elems;
  if (seed) {
    elems.emplace();
    for (const auto& spec : *seed) elems->push_back(resolve(*g, spec));
  }
  QONS q = qons(*g, std::move(elems), tol);
  return detail::dilation_from_qons(g, std::move(q), AlgebraElement::identity(s.target));
}

struct NonunitalDilation {
  WeakTensorDilation dilation;
  AlgebraElement abs_xi;
  AlgebraElement p0;
};

/// For non-unital S: xi = xi0 |xi|, QONS seeded with xi0, and
/// S(a) = |xi| (id (x) psi)(j(a)) |xi|.
inline NonunitalDilation nonunital_recovery(const CPMap& s, double tol = kDefaultTol) {
  if (!s.is_cp) throw Error(ErrorKind::NotCP, "nonunital_recovery: map is not CP", s.choi_min_eigenvalue);
  auto g = std::make_shared<const GNSData>(gns(s, tol));
  ModulePolar polar = polar_decompose_module(*g, g->xi, tol);
  QONS q = qons(*g, std::vector<ComplexMatrix>{polar.partial_isometry}, tol);
  NonunitalDilation out{detail::dilation_from_qons(g, std::move(q), polar.absolute), polar.absolute,
                        polar.support};
  return out;
}

}  // namespace wtdil

#endif  // WTDIL_DILATION_HPP
