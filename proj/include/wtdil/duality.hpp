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

// Duality between weak tensor dilations of the dual map S' : B' -> A' and
// state-covariant extensions Z : B(F) -> B(G) of S : A -> B.
//
// A acts on F, B acts on G; f in F and g in G are unit vectors with
// phi_f = phi_g o S. Operators on F (x) L keep the L index slowest, so
// f (x) l is kron(l, f) and x (x) 1_L is kron(1_L, x).

#ifndef WTDIL_DUALITY_HPP
#define WTDIL_DUALITY_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "wtdil/dilation.hpp"

namespace wtdil {

struct DualityContext {
  MatrixBlockAlgebra a_alg;  // on F
  MatrixBlockAlgebra b_alg;  // on G
  CPMap map;
  VectorState f;
  VectorState g;
  bool f_cyclic_for_A = false;
  bool g_cyclic_for_Bprime = false;
  bool covariant = false;
  double covariance_residual = 0.0;
  Eigen::Index f_rank = 0;  // dim span{a f}
  Eigen::Index g_rank = 0;  // dim span{b' g}
  double tol = kMembershipTol;

  MatrixBlockAlgebra a_prime() const { return commutant(a_alg); }
  MatrixBlockAlgebra b_prime() const { return commutant(b_alg); }
};

namespace detail {

// Columns represent(x_k) v over the coordinate basis of alg.
inline ComplexMatrix orbit(const MatrixBlockAlgebra& alg, const ComplexVector& v) {
  ComplexMatrix m(alg.ambient_dim(), alg.coord_dim());
  for (Eigen::Index k = 0; k < alg.coord_dim(); ++k) m.col(k) = represent_basis(alg, k) * v;
  return m;
}

inline void require_covariant(const DualityContext& ctx, const char* where) {
  if (!ctx.covariant) {
    throw Error(ErrorKind::NotCovariant, std::string(where) + ": phi_f != phi_g o S",
                ctx.covariance_residual);
  }
}

inline void require_f_cyclic(const DualityContext& ctx) {
  if (!ctx.f_cyclic_for_A) throw Error(ErrorKind::NotCyclic, "f not cyclic for A");
}

inline void require_g_cyclic(const DualityContext& ctx) {
  if (!ctx.g_cyclic_for_Bprime) throw Error(ErrorKind::NotCyclic, "g not cyclic for B'");
}

// Solves X M = R by least squares and rejects inconsistent systems.
inline ComplexMatrix solve_on_span(const ComplexMatrix& m, const ComplexMatrix& r, double tol,
                                   const char* where, double* consistency = nullptr) {
  const ComplexMatrix x = r * pinv(m, kDefaultTol);
  const double res = residual(x * m, r);
  if (consistency) *consistency = res;
  if (res > tol * std::max(1.0, r.norm())) {
    throw Error(ErrorKind::InconsistentSystem, std::string(where) + ": system is inconsistent", res);
  }
  return x;
}

inline double restriction_residual(const CPMap& s, const ComplexMatrix& xi, Eigen::Index l_dim) {
  const ComplexMatrix il = ComplexMatrix::Identity(l_dim, l_dim);
  double worst = 0.0;
  for (Eigen::Index k = 0; k < s.source.coord_dim(); ++k) {
    const AlgebraElement a = AlgebraElement::basis(s.source, k);
    const ComplexMatrix za = xi.adjoint() * kron(il, represent(a)) * xi;
    worst = std::max(worst, residual(za, represent(apply(s, a))));
  }
  return worst;
}

// max over matrix units x of B(F) of |phi_f(x) - phi_g(Z(x))|.
inline double extension_covariance_residual(const ComplexMatrix& xi, Eigen::Index l_dim,
                                            const VectorState& f, const VectorState& g) {
  const Eigen::Index nf = f.dim();
  const ComplexVector xg = xi * g.vector();
  double worst = 0.0;
  for (Eigen::Index u = 0; u < nf; ++u)
    for (Eigen::Index v = 0; v < nf; ++v) {
      const Complex lhs = std::conj(f.vector()(u)) * f.vector()(v);
      Complex rhs = 0.0;
      for (Eigen::Index l = 0; l < l_dim; ++l) rhs += std::conj(xg(l * nf + u)) * xg(l * nf + v);
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  return worst;
}

}  // namespace detail

/// Bundles S, f, g and evaluates cyclicity and covariance. Never throws on a
/// failed hypothesis; the flags record it.
inline DualityContext build_context(const CPMap& s, const ComplexVector& f, const ComplexVector& g,
                                    double tol = kMembershipTol) {
  if (f.size() != s.source.ambient_dim() || g.size() != s.target.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "build_context: state dimension mismatch");
  }
  DualityContext ctx;
  ctx.a_alg = s.source;
  ctx.b_alg = s.target;
  ctx.map = s;
  ctx.f = VectorState(f);
  ctx.g = VectorState(g);
  ctx.tol = tol;
  ctx.f_rank = numerical_rank(detail::orbit(ctx.a_alg, f));
  ctx.g_rank = numerical_rank(detail::orbit(ctx.b_prime(), g));
  ctx.f_cyclic_for_A = ctx.f_rank == ctx.a_alg.ambient_dim();
  ctx.g_cyclic_for_Bprime = ctx.g_rank == ctx.b_alg.ambient_dim();
  ctx.covariance_residual = covariance_residual(s, ctx.f, ctx.g);
  ctx.covariant = ctx.covariance_residual <= tol;
  return ctx;
}

/// xi' : F -> H with xi'(a f) = rho(a) xi g. With allow_partial a non-cyclic
/// f is accepted and xi' vanishes on the complement of A f.
inline ComplexMatrix xi_prime(const DualityContext& ctx, const GNSData& d, double tol = kMembershipTol,
                              bool allow_partial = false, double* consistency = nullptr) {
  detail::require_covariant(ctx, "xi_prime");
  if (!allow_partial) detail::require_f_cyclic(ctx);
  const MatrixBlockAlgebra& a = ctx.a_alg;
  const ComplexMatrix mf = detail::orbit(a, ctx.f.vector());
  ComplexMatrix r(d.h_dim, a.coord_dim());
  const ComplexVector xg = d.xi * ctx.g.vector();
  for (Eigen::Index k = 0; k < a.coord_dim(); ++k) r.col(k) = d.rho[static_cast<std::size_t>(k)] * xg;
  return detail::solve_on_span(mf, r, tol, "xi_prime", consistency);
}

struct DualMap {
  CPMap map;  // S' : B' -> A'
  std::shared_ptr<const GNSData> gns;
  ComplexMatrix xi_prime;
  double consistency = 0.0;    // least-squares residual of xi'
  double isometry = 0.0;       // ||xi'* xi' - 1||
  double intertwining = 0.0;   // max ||rho(a) xi' - xi' a||
  double membership = 0.0;     // max distance of xi'* rho'(b') xi' from A'
  double pairing = 0.0;        // max |phi_g(b' S(a)) - phi_f(S'(b') a)|
  double state = 0.0;          // max |phi_f(S'(b')) - phi_g(b')|
  double gns_identity = 0.0;   // max ||rho'(b') xi' a f - rho(a) xi b' g||

  double max() const {
    return std::max({consistency, isometry, intertwining, membership, pairing, state, gns_identity});
  }
};

/// S'(b') = xi'* rho'(b') xi', the unique CP map with
/// phi_g(b' S(a)) = phi_f(S'(b') a).
inline DualMap dual_map(const DualityContext& ctx, double tol = kMembershipTol) {
  detail::require_covariant(ctx, "dual_map");
  detail::require_f_cyclic(ctx);
  DualMap out;
  auto d = std::make_shared<const GNSData>(gns(ctx.map));
  out.xi_prime = xi_prime(ctx, *d, tol, false, &out.consistency);
  const ComplexMatrix& xp = out.xi_prime;
  const Eigen::Index nf = ctx.a_alg.ambient_dim();
  out.isometry = residual(xp.adjoint() * xp, ComplexMatrix::Identity(nf, nf));

  const MatrixBlockAlgebra ap = ctx.a_prime();
  const MatrixBlockAlgebra& bp = d->target_commutant;
  ComplexMatrix action(ap.coord_dim(), bp.coord_dim());
  for (Eigen::Index k = 0; k < bp.coord_dim(); ++k) {
    const ComplexMatrix m = xp.adjoint() * d->rho_prime[static_cast<std::size_t>(k)] * xp;
    Projection p = project(ap, m);
    out.membership = std::max(out.membership, p.residual);
    if (p.residual > tol * std::max(1.0, m.norm())) {
      throw Error(ErrorKind::NotInCommutant, "dual_map: xi'* rho'(b') xi' is not in A'", p.residual);
    }
    action.col(k) = p.element.coordinates();
  }
  out.map = make_cpmap(bp, ap, std::move(action));

  const ComplexVector& f = ctx.f.vector();
  const ComplexVector& g = ctx.g.vector();
  for (Eigen::Index k = 0; k < ctx.a_alg.coord_dim(); ++k) {
    const AlgebraElement a = AlgebraElement::basis(ctx.a_alg, k);
    const ComplexMatrix ra = represent(a);
    const ComplexMatrix& rho_a = d->rho[static_cast<std::size_t>(k)];
    out.intertwining = std::max(out.intertwining, residual(rho_a * xp, xp * ra));
    const ComplexMatrix sa = represent(apply(ctx.map, a));
    for (Eigen::Index l = 0; l < bp.coord_dim(); ++l) {
      const AlgebraElement b = AlgebraElement::basis(bp, l);
      const ComplexMatrix rb = represent(b);
      const ComplexMatrix spb = represent(apply(out.map, b));
      out.pairing = std::max(out.pairing, std::abs(ctx.g(rb * sa) - ctx.f(spb * ra)));
      const ComplexVector lhs = d->rho_prime[static_cast<std::size_t>(l)] * xp * (ra * f);
      const ComplexVector rhs = rho_a * d->xi * (rb * g);
      out.gns_identity = std::max(out.gns_identity, (lhs - rhs).norm());
    }
  }
  for (Eigen::Index l = 0; l < bp.coord_dim(); ++l) {
    const AlgebraElement b = AlgebraElement::basis(bp, l);
    out.state = std::max(out.state, std::abs(ctx.f(represent(apply(out.map, b))) - ctx.g(represent(b))));
  }
  out.gns = std::move(d);
  return out;
}

struct DoubleDual {
  DualMap first;
  DualMap second;  // S'' : A -> B
  double residual = 0.0;  // ||S'' - S|| on coordinates
};

/// Dualizes twice, exchanging the roles of (A, f) and (B', g) in between.
inline DoubleDual double_dual(const DualityContext& ctx, double tol = kMembershipTol) {
  detail::require_f_cyclic(ctx);
  detail::require_g_cyclic(ctx);
  DoubleDual out;
  out.first = dual_map(ctx, tol);
  const DualityContext back = build_context(out.first.map, ctx.g.vector(), ctx.f.vector(), tol);
  out.second = dual_map(back, tol);
  if (!(out.second.map.source == ctx.a_alg) || !(out.second.map.target == ctx.b_alg)) {
    throw Error(ErrorKind::AlgebraMismatch, "double_dual: bicommutant differs from the original algebra");
  }
  out.residual = (out.second.map.action - ctx.map.action).norm();
  return out;
}

struct ExtensionCertificate {
  double consistency = 0.0;   // least-squares residual of xi
  double isometry = 0.0;      // ||xi* xi - 1||
  double restriction = 0.0;   // max ||Z(a) - S(a)||
  double covariance = 0.0;    // max |phi_f(x) - phi_g(Z(x))|
  double unital = 0.0;        // ||Z(1) - 1||
  double choi_min = 0.0;      // smallest Choi eigenvalue of Z

  double max() const { return std::max({consistency, isometry, restriction, covariance, unital, -choi_min}); }
  bool passes(double tol) const { return max() <= tol; }
};

struct Extension {
  CPMap z;            // B(F) -> B(G)
  KrausForm kraus;    // xi : G -> F (x) L, Z(x) = xi* (x (x) 1_L) xi
  ComplexVector ell;  // xi g = f (x) ell, when known
  ExtensionCertificate certificate;

  Eigen::Index l_dim() const { return kraus.l_dim; }
};

namespace detail {

inline Extension extension_from_isometry(const DualityContext& ctx, ComplexMatrix xi, Eigen::Index l_dim,
                                         ComplexVector ell, double consistency) {
  const Eigen::Index nf = ctx.a_alg.ambient_dim();
  const Eigen::Index ng = ctx.b_alg.ambient_dim();
  Extension e;
  e.z = cpmap_from_isometry(nf, xi);
  e.kraus.l_dim = l_dim;
  for (Eigen::Index l = 0; l < l_dim; ++l) e.kraus.kraus_ops.push_back(xi.middleRows(l * nf, nf));
  e.kraus.stinespring = std::move(xi);
  e.ell = std::move(ell);
  const ComplexMatrix& s = e.kraus.stinespring;
  e.certificate.consistency = consistency;
  e.certificate.isometry = residual(s.adjoint() * s, ComplexMatrix::Identity(ng, ng));
  e.certificate.restriction = restriction_residual(ctx.map, s, l_dim);
  e.certificate.covariance = extension_covariance_residual(s, l_dim, ctx.f, ctx.g);
  e.certificate.unital = e.z.unital_residual;
  e.certificate.choi_min = std::min(0.0, e.z.choi_min_eigenvalue);
  return e;
}

}  // namespace detail

/// Z(x) = xi* (x (x) 1_L) xi with xi(b' g) = j(b')(f (x) l), for a weak tensor
/// dilation (j, l) of S' on F (x) L.
inline Extension extension_from_dilation(const DualityContext& ctx, const WeakTensorDilation& dual_dilation,
                                         double tol = kMembershipTol) {
  detail::require_g_cyclic(ctx);
  if (!(dual_dilation.map.source == ctx.b_prime()) || !(dual_dilation.map.target == ctx.a_prime())) {
    throw Error(ErrorKind::AlgebraMismatch, "extension_from_dilation: dilation is not of a map B' -> A'");
  }
  const MatrixBlockAlgebra bp = ctx.b_prime();
  const ComplexVector fl = kron(dual_dilation.state, ctx.f.vector());
  const ComplexMatrix mg = detail::orbit(bp, ctx.g.vector());
  ComplexMatrix r(fl.size(), bp.coord_dim());
  for (Eigen::Index k = 0; k < bp.coord_dim(); ++k) r.col(k) = dual_dilation.j[static_cast<std::size_t>(k)] * fl;
  double consistency = 0.0;
  ComplexMatrix xi = detail::solve_on_span(mg, r, tol, "extension_from_dilation", &consistency);
  return detail::extension_from_isometry(ctx, std::move(xi), dual_dilation.k_dim, dual_dilation.state,
                                         consistency);
}

struct DualDilation {
  WeakTensorDilation dilation;  // j : B' -> A' (x) B(L), state ell
  ComplexMatrix p_H;            // j(1)
  Eigen::Index h_dim = 0;
  double consistency = 0.0;     // max ||j(b') V - W_b'||
  double membership = 0.0;      // max distance of j(b') from A' (x) B(L)
  double state = 0.0;           // ||xi g - f (x) ell||
  double restriction = 0.0;     // ||Z|A - S||
};

/// Recovers the dilation of S' from an extension Z: H = span{(a (x) 1) xi G},
/// rho'(b') (a (x) 1) xi y = (a (x) 1) xi b' y, j(b') = rho'(b') p_H and
/// ell from xi g = f (x) ell.
inline DualDilation dilation_from_extension(const DualityContext& ctx, const CPMap& z,
                                            double tol = kMembershipTol) {
  detail::require_f_cyclic(ctx);
  detail::require_covariant(ctx, "dilation_from_extension");
  const Eigen::Index nf = ctx.a_alg.ambient_dim();
  const Eigen::Index ng = ctx.b_alg.ambient_dim();
  if (!(z.source == full_algebra(nf)) || !(z.target == full_algebra(ng))) {
    throw Error(ErrorKind::AlgebraMismatch, "dilation_from_extension: Z must map B(F) to B(G)");
  }
  const KrausForm kraus = kraus_decomposition(z);
  const ComplexMatrix& xi = kraus.stinespring;
  const Eigen::Index l_dim = kraus.l_dim;

  DualDilation out;
  out.restriction = detail::restriction_residual(ctx.map, xi, l_dim);
  if (out.restriction > tol) {
    throw Error(ErrorKind::NotExtension, "dilation_from_extension: Z does not restrict to S on A",
                out.restriction);
  }

  const ComplexMatrix il = ComplexMatrix::Identity(l_dim, l_dim);
  const Eigen::Index na = ctx.a_alg.coord_dim();
  std::vector<ComplexMatrix> lifted;
  lifted.reserve(static_cast<std::size_t>(na));
  ComplexMatrix v(nf * l_dim, na * ng);
  for (Eigen::Index k = 0; k < na; ++k) {
    lifted.push_back(kron(il, represent_basis(ctx.a_alg, k)) * xi);
    v.middleCols(k * ng, ng) = lifted.back();
  }
  const ComplexMatrix v_pinv = pinv(v, kDefaultTol);
  out.p_H = v * v_pinv;
  out.h_dim = numerical_rank(v);

  const MatrixBlockAlgebra bp = ctx.b_prime();
  const MatrixBlockAlgebra ap = ctx.a_prime();
  std::vector<ComplexMatrix> values;
  values.reserve(static_cast<std::size_t>(bp.coord_dim()));
  ComplexMatrix w(v.rows(), v.cols());
  for (Eigen::Index l = 0; l < bp.coord_dim(); ++l) {
    const ComplexMatrix rb = represent_basis(bp, l);
    for (Eigen::Index k = 0; k < na; ++k) w.middleCols(k * ng, ng) = lifted[static_cast<std::size_t>(k)] * rb;
    ComplexMatrix jb = w * v_pinv;
    const double res = residual(jb * v, w);
    out.consistency = std::max(out.consistency, res);
    if (res > tol * std::max(1.0, w.norm())) {
      throw Error(ErrorKind::InconsistentSystem, "dilation_from_extension: rho' is not well defined", res);
    }
    out.membership = std::max(out.membership, project_tensor_k(ap, l_dim, jb).residual);
    values.push_back(std::move(jb));
  }

  const ComplexVector xg = xi * ctx.g.vector();
  const ComplexVector& f = ctx.f.vector();
  ComplexVector ell(l_dim);
  for (Eigen::Index l = 0; l < l_dim; ++l) ell(l) = f.dot(xg.segment(l * nf, nf));
  out.state = (xg - kron(ell, f)).norm();
  if (out.state > tol) {
    throw Error(ErrorKind::StateMismatch, "dilation_from_extension: xi g is not of the form f (x) l",
                out.state);
  }
  ell /= ell.norm();

  DualMap sp = dual_map(ctx, tol);
  out.dilation = make_dilation(std::move(sp.map), l_dim, std::move(ell), std::move(values));
  return out;
}

/// Minimal iff j(B') (A' f (x) ell) spans the range of j(1), i.e. the module
/// generated by 1 (x) ell is all of j(1) (A' (x) L).
inline bool is_minimal_dilation(const WeakTensorDilation& d, double tol = kDefaultTol) {
  const MatrixBlockAlgebra& bp = d.map.source;
  const MatrixBlockAlgebra& ap = d.map.target;
  const Eigen::Index nf = ap.ambient_dim();
  const Eigen::Index nb = bp.coord_dim();
  ComplexMatrix span(nf * d.k_dim, nb * nf);
  for (Eigen::Index l = 0; l < nb; ++l)
    for (Eigen::Index s = 0; s < nf; ++s)
      span.col(l * nf + s) = d.j[static_cast<std::size_t>(l)] * kron(d.state, basis_vector(nf, s));
  return numerical_rank(span, tol) == numerical_rank(d.p_I, tol);
}

/// Dual map, its weak tensor dilation, and the extension built from it.
struct ExtensionPipeline {
  DualMap dual;
  WeakTensorDilation dual_dilation;
  Extension extension;
};

inline ExtensionPipeline extend_cp_map_pipeline(const DualityContext& ctx, double tol = kMembershipTol) {
  detail::require_covariant(ctx, "extend_cp_map");
  detail::require_f_cyclic(ctx);
  detail::require_g_cyclic(ctx);
  DualMap dual = dual_map(ctx, tol);
  WeakTensorDilation d = weak_tensor_dilation(dual.map);
  Extension e = extension_from_dilation(ctx, d, tol);
  return {std::move(dual), std::move(d), std::move(e)};
}

inline Extension extend_cp_map(const DualityContext& ctx, double tol = kMembershipTol) {
  return extend_cp_map_pipeline(ctx, tol).extension;
}

/// Z -> (j, ell) -> Z.
struct ExtensionRoundTrip {
  DualDilation recovered;
  Extension rebuilt;
  double choi_distance = 0.0;
};

inline ExtensionRoundTrip roundtrip_extension(const DualityContext& ctx, const CPMap& z,
                                              double tol = kMembershipTol) {
  ExtensionRoundTrip out;
  out.recovered = dilation_from_extension(ctx, z, tol);
  out.rebuilt = extension_from_dilation(ctx, out.recovered.dilation, tol);
  out.choi_distance = residual(out.rebuilt.z.choi, z.choi);
  return out;
}

/// (j, ell) -> Z -> (j~, ell~) for a minimal dilation of S'.
struct DilationRoundTrip {
  Extension extension;
  DualDilation recovered;
  double dual_residual = 0.0;  // ||P_ell~(j~) - S'|| on coordinates
  bool l_dim_match = false;
  Eigen::Index choi_rank = 0;
};

inline DilationRoundTrip roundtrip_dilation(const DualityContext& ctx, const WeakTensorDilation& d,
                                            double tol = kMembershipTol) {
  DilationRoundTrip out;
  out.extension = extension_from_dilation(ctx, d, tol);
  out.recovered = dilation_from_extension(ctx, out.extension.z, tol);
  out.choi_rank = out.recovered.dilation.k_dim;
  out.l_dim_match = out.recovered.dilation.k_dim == d.k_dim;
  const WeakTensorDilation& r = out.recovered.dilation;
  const ConditionalExpectation p = r.expectation();
  for (Eigen::Index k = 0; k < d.map.source.coord_dim(); ++k) {
    const AlgebraElement b = AlgebraElement::basis(d.map.source, k);
    out.dual_residual = std::max(out.dual_residual, residual(p.apply_ambient(r.j[static_cast<std::size_t>(k)]),
                                                             represent(apply(d.map, b))));
  }
  return out;
}

}  // namespace wtdil

#endif  // WTDIL_DUALITY_HPP
