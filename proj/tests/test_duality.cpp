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

#include <cmath>

#include "test_util.hpp"
#include "wtdil/duality.hpp"
#include "wtdil/instances.hpp"

namespace wtdil {
namespace {

using testing::expect_error;

// max |phi_g(b' S(a)) - phi_f(S'(b') a)| over random a in A and b' in B'.
double pairing_oracle(Rng& rng, const DualityContext& ctx, const CPMap& sp, int samples) {
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    const AlgebraElement a = random_element(rng, ctx.a_alg);
    const AlgebraElement b = random_element(rng, sp.source);
    const Complex lhs = ctx.g(represent(b) * represent(apply(ctx.map, a)));
    const Complex rhs = ctx.f(represent(apply(sp, b)) * represent(a));
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, a.norm() * b.norm()));
  }
  return worst;
}

// Restriction to A and covariance on B(F), checked on random inputs.
double extension_oracle(Rng& rng, const DualityContext& ctx, const CPMap& z, int samples) {
  double worst = 0.0;
  const Eigen::Index nf = ctx.a_alg.ambient_dim();
  for (int t = 0; t < samples; ++t) {
    const AlgebraElement a = random_element(rng, ctx.a_alg);
    const ComplexMatrix za = represent(apply(z, decompose(z.source, represent(a))));
    worst = std::max(worst, residual(za, represent(apply(ctx.map, a))) / std::max(1.0, a.norm()));
    const ComplexMatrix x = random_gaussian(rng, nf, nf);
    const ComplexMatrix zx = represent(apply(z, decompose(z.source, x)));
    worst = std::max(worst, std::abs(ctx.f(x) - ctx.g(zx)) / std::max(1.0, op_norm(x)));
  }
  return worst;
}

TEST(Context, FlagsOnSmallInstances) {
  const DualityContext avg = averaging::context();
  EXPECT_TRUE(avg.covariant);
  EXPECT_TRUE(avg.f_cyclic_for_A);
  EXPECT_TRUE(avg.g_cyclic_for_Bprime);
  EXPECT_EQ(avg.f_rank, 2);

  const ComplexVector e0 = basis_vector(2, 0);
  const DualityContext noncyclic = build_context(identity_map(averaging::diagonal_c2()), e0, e0);
  EXPECT_TRUE(noncyclic.covariant);
  EXPECT_FALSE(noncyclic.f_cyclic_for_A);
  EXPECT_FALSE(noncyclic.g_cyclic_for_Bprime);
  EXPECT_EQ(noncyclic.f_rank, 1);

  const DualityContext noncov = build_context(averaging::map(), e0, averaging::uniform());
  EXPECT_FALSE(noncov.covariant);
  EXPECT_NEAR(noncov.covariance_residual, 0.5, 1e-15);
  expect_error(ErrorKind::ShapeMismatch, [&] { build_context(averaging::map(), basis_vector(3, 0), e0); });
}

TEST(XiPrime, IsometryAndIntertwining) {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 4);
    const GNSData d = gns(ctx.map);
    double consistency = -1.0;
    const ComplexMatrix xp = xi_prime(ctx, d, kMembershipTol, false, &consistency);
    EXPECT_GE(consistency, 0.0);
    EXPECT_LE(consistency, 1e-9);
    const Eigen::Index nf = ctx.a_alg.ambient_dim();
    EXPECT_LE(residual(xp.adjoint() * xp, ComplexMatrix::Identity(nf, nf)), 1e-9);
    const AlgebraElement a = random_element(rng, ctx.a_alg);
    EXPECT_LE(residual(d.rho_of(a) * xp, xp * represent(a)), 1e-9 * std::max(1.0, a.norm()));
    // xi' f = xi g.
    EXPECT_LE((xp * ctx.f.vector() - d.xi * ctx.g.vector()).norm(), 1e-9);
  }
}

TEST(XiPrime, PartialOnNonCyclicVector) {
  const ComplexVector e0 = basis_vector(2, 0);
  const DualityContext ctx = build_context(identity_map(averaging::diagonal_c2()), e0, e0);
  const GNSData d = gns(ctx.map);
  expect_error(ErrorKind::NotCyclic, [&] { xi_prime(ctx, d); });
  const ComplexMatrix xp = xi_prime(ctx, d, kMembershipTol, true);
  EXPECT_LE((xp * e0 - d.xi * e0).norm(), 1e-12);
  EXPECT_LE((xp * basis_vector(2, 1)).norm(), 1e-12);
}

TEST(XiPrime, RequiresCovariance) {
  const DualityContext ctx = build_context(averaging::map(), basis_vector(2, 0), averaging::uniform());
  const GNSData d = gns(ctx.map);
  expect_error(ErrorKind::NotCovariant, [&] { xi_prime(ctx, d); });
  expect_error(ErrorKind::NotCovariant, [&] { dual_map(ctx); });
  expect_error(ErrorKind::NotCovariant, [&] { extend_cp_map(ctx); });
}

TEST(DualMap, AveragingMapIsSelfDual) {
  const DualityContext ctx = averaging::context();
  const DualMap sp = dual_map(ctx);
  EXPECT_LE(sp.max(), 1e-12);
  ASSERT_TRUE(sp.map.source == ctx.a_alg);
  EXPECT_LE(residual(sp.map.action, ctx.map.action), 1e-12);
  Rng rng(2);
  EXPECT_LE(pairing_oracle(rng, ctx, sp.map, 20), 1e-12);
}

TEST(DualMap, RandomInstancesSatisfyPairing) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 5);
    const DualMap sp = dual_map(ctx);
    EXPECT_LE(sp.max(), 1e-9) << "trial " << trial;
    EXPECT_TRUE(sp.map.is_cp);
    EXPECT_TRUE(sp.map.is_unital);
    EXPECT_TRUE(sp.map.source == ctx.b_prime());
    EXPECT_TRUE(sp.map.target == ctx.a_prime());
    EXPECT_LE(pairing_oracle(rng, ctx, sp.map, 5), 1e-9) << "trial " << trial;
    // phi_f o S' = phi_g on B'.
    const AlgebraElement b = random_element(rng, sp.map.source);
    EXPECT_LE(std::abs(ctx.f(represent(apply(sp.map, b))) - ctx.g(represent(b))), 1e-9 * std::max(1.0, b.norm()));
  }
}

TEST(DualMap, DoubleDualRecoversMap) {
  Rng rng(4);
  const DoubleDual avg = double_dual(averaging::context());
  EXPECT_LE(avg.residual, 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 4);
    const DoubleDual dd = double_dual(ctx);
    EXPECT_LE(dd.residual, 1e-9) << "trial " << trial;
    EXPECT_LE(dd.second.max(), 1e-9);
  }
  const ComplexVector e0 = basis_vector(2, 0);
  expect_error(ErrorKind::NotCyclic,
               [&] { double_dual(build_context(identity_map(averaging::diagonal_c2()), e0, e0)); });
}

TEST(Extension, AveragingMap) {
  const DualityContext ctx = averaging::context();
  const ExtensionPipeline p = extend_cp_map_pipeline(ctx);
  EXPECT_TRUE(p.extension.certificate.passes(1e-12)) << p.extension.certificate.max();
  EXPECT_TRUE(p.extension.z.is_cp);
  EXPECT_TRUE(p.extension.z.is_unital);
  Rng rng(5);
  EXPECT_LE(extension_oracle(rng, ctx, p.extension.z, 20), 1e-12);
  EXPECT_TRUE(is_minimal_dilation(p.dual_dilation));
  EXPECT_EQ(p.extension.l_dim(), p.dual_dilation.k_dim);
}

TEST(Extension, FullSourceAlgebraForcesZEqualsS) {
  // A = B(F) leaves no room: Z = S = phi_f with G = C.
  Rng rng(6);
  const ComplexVector f = random_unit_vector(rng, 3);
  const MatrixBlockAlgebra a = full_algebra(3);
  const MatrixBlockAlgebra c = full_algebra(1);
  const VectorState phi(f);
  const CPMap s = cpmap_from_function(a, c, [&](const AlgebraElement& x) {
    return ComplexMatrix::Constant(1, 1, phi(represent(x)));
  });
  const DualityContext ctx = build_context(s, f, ComplexVector::Ones(1));
  ASSERT_TRUE(ctx.covariant && ctx.f_cyclic_for_A && ctx.g_cyclic_for_Bprime);
  const Extension e = extend_cp_map(ctx);
  EXPECT_TRUE(e.certificate.passes(1e-12)) << e.certificate.max();
  EXPECT_LE(residual(e.z.action, s.action), 1e-12);
}

TEST(Extension, RandomInstances) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 4);
    const ExtensionPipeline p = extend_cp_map_pipeline(ctx);
    EXPECT_TRUE(p.extension.certificate.passes(1e-9)) << "trial " << trial << ": " << p.extension.certificate.max();
    EXPECT_LE(extension_oracle(rng, ctx, p.extension.z, 3), 1e-9) << "trial " << trial;
    EXPECT_TRUE(is_minimal_dilation(p.dual_dilation));
  }
}

TEST(Extension, RejectsNonExtensions) {
  const DualityContext ctx = averaging::context();
  // Z = id does not restrict to S.
  expect_error(ErrorKind::NotExtension, [&] { dilation_from_extension(ctx, identity_map(full_algebra(2))); });
  // Z(x) = tr(x)/2 restricts to S but is not covariant, so xi g is no product.
  const MatrixBlockAlgebra m2 = full_algebra(2);
  const CPMap trace = cpmap_from_function(m2, m2, [](const AlgebraElement& x) {
    return ComplexMatrix(0.5 * represent(x).trace() * ComplexMatrix::Identity(2, 2));
  });
  expect_error(ErrorKind::StateMismatch, [&] { dilation_from_extension(ctx, trace); });
  expect_error(ErrorKind::AlgebraMismatch, [&] { dilation_from_extension(ctx, averaging::map()); });
  expect_error(ErrorKind::AlgebraMismatch,
               [&] { extension_from_dilation(ctx, weak_tensor_dilation(identity_map(full_algebra(2)))); });
}

TEST(Minimality, DoubledMultiplicitySpaceIsNotMinimal) {
  const DualityContext ctx = averaging::context();
  const WeakTensorDilation d = weak_tensor_dilation(dual_map(ctx).map);
  ASSERT_TRUE(is_minimal_dilation(d));
  std::vector<ComplexMatrix> doubled;
  for (const auto& v : d.j) doubled.push_back(kron(ComplexMatrix::Identity(2, 2), v));
  const WeakTensorDilation big = make_dilation(d.map, 2 * d.k_dim, kron(basis_vector(2, 0), d.state), doubled);
  EXPECT_LE(big.certificate.max(), 1e-12);
  EXPECT_FALSE(is_minimal_dilation(big));

  // The extension built from the larger dilation is the same map; its Choi
  // rank recovers the minimal multiplicity.
  const DilationRoundTrip rt = roundtrip_dilation(ctx, big);
  EXPECT_FALSE(rt.l_dim_match);
  EXPECT_EQ(rt.choi_rank, d.k_dim);
  EXPECT_LE(residual(rt.extension.z.action, extension_from_dilation(ctx, d).z.action), 1e-12);
}

TEST(RoundTrip, ExtensionAndDilation) {
  Rng rng(8);
  const DualityContext avg = averaging::context();
  const ExtensionRoundTrip ert = roundtrip_extension(avg, extend_cp_map(avg).z);
  EXPECT_LE(ert.choi_distance, 1e-12);
  for (int trial = 0; trial < 30; ++trial) {
    const DualityContext ctx = random_covariant_instance(rng, 4);
    const ExtensionPipeline p = extend_cp_map_pipeline(ctx);
    const ExtensionRoundTrip e = roundtrip_extension(ctx, p.extension.z);
    EXPECT_LE(e.choi_distance, 1e-9) << "trial " << trial;
    EXPECT_LE(e.recovered.dilation.certificate.max(), 1e-9);
    const DilationRoundTrip d = roundtrip_dilation(ctx, p.dual_dilation);
    EXPECT_TRUE(d.l_dim_match) << "trial " << trial;
    EXPECT_LE(d.dual_residual, 1e-9);
  }
}

}  // namespace
}  // namespace wtdil
