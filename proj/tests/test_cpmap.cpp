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
#include "wtdil/cpmap.hpp"
#include "wtdil/instances.hpp"

namespace wtdil {
namespace {

using testing::expect_error;
using testing::is_psd;

CPMap transpose_map(Eigen::Index n) {
  const MatrixBlockAlgebra m = full_algebra(n);
  ComplexMatrix action = ComplexMatrix::Zero(n * n, n * n);
  for (Eigen::Index u = 0; u < n; ++u)
    for (Eigen::Index v = 0; v < n; ++v) action(v * n + u, u * n + v) = 1.0;
  return make_cpmap(m, m, action);
}

// (id_n (x) S)(Y* Y) for Y an n x n matrix over A, in ambient form.
ComplexMatrix amplified_image(const CPMap& s, const std::vector<std::vector<AlgebraElement>>& y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const Eigen::Index g = s.target.ambient_dim();
  ComplexMatrix out = ComplexMatrix::Zero(n * g, n * g);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      AlgebraElement x(s.source);
      for (Eigen::Index k = 0; k < n; ++k) x = x + y[k][i].adjoint() * y[k][j];
      out.block(i * g, j * g, g, g) = represent(apply(s, x));
    }
  return out;
}

TEST(CPMap, TransposeIsPositiveButNotCP) {
  const CPMap t = transpose_map(2);
  EXPECT_FALSE(t.is_cp);
  EXPECT_NEAR(t.choi_min_eigenvalue, -1.0, 1e-14);
  EXPECT_TRUE(t.is_unital);
  Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix p = testing::random_psd(rng, 2);
    EXPECT_TRUE(is_psd(represent(apply(t, decompose(t.source, p)))));
  }
  // Amplification by M_2 detects the failure on the swap-related Bell projector.
  std::vector<std::vector<AlgebraElement>> y(2, std::vector<AlgebraElement>(2, AlgebraElement(t.source)));
  ComplexMatrix e00 = ComplexMatrix::Zero(2, 2), e01 = ComplexMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e01(0, 1) = 1.0;
  y[0][0] = decompose(t.source, e00);
  y[0][1] = decompose(t.source, e01);
  EXPECT_FALSE(is_psd(amplified_image(t, y), 1e-12));
  expect_error(ErrorKind::NotCP, [&] { kraus_decomposition(t); });
}

TEST(CPMap, RandomUnitalMapsAreCompletelyPositive) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const CPMap s = random_unital_cp_map(rng, 5);
    EXPECT_TRUE(s.is_cp);
    EXPECT_TRUE(s.is_unital);
    EXPECT_LE(s.unital_residual, 1e-10);
    for (Eigen::Index n = 2; n <= 3; ++n) {
      std::vector<std::vector<AlgebraElement>> y(n);
      for (auto& row : y)
        for (Eigen::Index j = 0; j < n; ++j) row.push_back(random_element(rng, s.source));
      EXPECT_TRUE(is_psd(amplified_image(s, y), 1e-9)) << "n = " << n;
    }
  }
}

TEST(CPMap, ChoiOfAveragingMap) {
  const CPMap s = averaging::map();
  EXPECT_TRUE(s.is_cp);
  EXPECT_TRUE(s.is_unital);
  // Blocks of the source are 1x1, so the Choi matrix is diag(S(e_1), S(e_2)).
  ComplexMatrix expected = 0.5 * ComplexMatrix::Identity(4, 4);
  EXPECT_LE(residual(s.choi, expected), 1e-15);
  EXPECT_NEAR(s.choi_min_eigenvalue, 0.5, 1e-15);
}

TEST(CPMap, HermitianPreservationAndShapes) {
  const MatrixBlockAlgebra m = full_algebra(2);
  ComplexMatrix action = ComplexMatrix::Identity(4, 4);
  action(1, 1) = Complex(0.0, 1.0);
  expect_error(ErrorKind::NotHermitianPreserving, [&] { make_cpmap(m, m, action); });
  expect_error(ErrorKind::ShapeMismatch, [&] { make_cpmap(m, m, ComplexMatrix::Identity(3, 4)); });
  ComplexMatrix nan = ComplexMatrix::Identity(4, 4);
  nan(0, 0) = std::nan("");
  expect_error(ErrorKind::NonFinite, [&] { make_cpmap(m, m, nan); });
}

TEST(CPMap, NonUnitalDetected) {
  const CPMap half = scaled(identity_map(full_algebra(2)), 0.5);
  EXPECT_TRUE(half.is_cp);
  EXPECT_FALSE(half.is_unital);
  EXPECT_NEAR(half.unital_residual, std::sqrt(0.5), 1e-15);
}

TEST(CPMap, ComposeAgreesWithSequentialApplication) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixBlockAlgebra a = random_algebra(rng, 4);
    const MatrixBlockAlgebra b = random_algebra(rng, 4);
    const MatrixBlockAlgebra c = random_algebra(rng, 4);
    const CPMap s = random_unital_cp_map(rng, a, b);
    const CPMap t = random_unital_cp_map(rng, b, c);
    const CPMap ts = compose(t, s);
    EXPECT_TRUE(ts.is_cp);
    EXPECT_TRUE(ts.is_unital);
    const AlgebraElement x = random_element(rng, a);
    EXPECT_LE((apply(ts, x) - apply(t, apply(s, x))).coordinates().norm(), 1e-12);
  }
  expect_error(ErrorKind::AlgebraMismatch,
               [] { compose(identity_map(full_algebra(2)), identity_map(full_algebra(3))); });
}

TEST(CPMap, ApplyRejectsForeignElement) {
  const CPMap s = identity_map(full_algebra(2));
  expect_error(ErrorKind::AlgebraMismatch,
               [&] { apply(s, AlgebraElement::identity(averaging::diagonal_c2())); });
}

TEST(Covariance, AveragingMap) {
  const CPMap s = averaging::map();
  const VectorState u(averaging::uniform());
  EXPECT_LE(covariance_residual(s, u, u), 1e-15);
  EXPECT_TRUE(check_covariance(s, u, u));
  const VectorState e0(basis_vector(2, 0));
  // phi_{e0}(e_1) = 1 but phi_g(S(e_1)) = 1/2.
  EXPECT_NEAR(covariance_residual(s, e0, u), 0.5, 1e-15);
  EXPECT_FALSE(check_covariance(s, e0, u));
  expect_error(ErrorKind::ShapeMismatch, [&] { covariance_residual(s, VectorState(basis_vector(3, 0)), u); });
}

TEST(Kraus, ReconstructionOnRandomChannels) {
  Rng rng(4);
  std::uniform_int_distribution<int> dim(1, 4), count(1, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index nf = dim(rng), ng = dim(rng);
    std::vector<ComplexMatrix> ops;
    const int n = count(rng);
    for (int k = 0; k < n; ++k) ops.push_back(random_gaussian(rng, nf, ng));
    const CPMap z = cpmap_from_isometry(nf, stack_kraus(ops, nf, ng));
    ASSERT_TRUE(z.is_cp);
    const KrausForm kf = kraus_decomposition(z);
    EXPECT_EQ(kf.l_dim, numerical_rank(z.choi));
    EXPECT_LE(kf.l_dim, n);
    const CPMap rebuilt = cpmap_from_isometry(nf, kf.stinespring);
    EXPECT_LE(residual(rebuilt.action, z.action), 1e-10 * std::max(1.0, z.action.norm()));
    // Direct evaluation of sum_k A_k* x A_k on a random x.
    const ComplexMatrix x = random_gaussian(rng, nf, nf);
    ComplexMatrix direct = ComplexMatrix::Zero(ng, ng);
    for (const auto& a : kf.kraus_ops) direct += a.adjoint() * x * a;
    const ComplexMatrix via_map = represent(apply(z, decompose(z.source, x)));
    EXPECT_LE(residual(direct, via_map), 1e-10 * std::max(1.0, via_map.norm()));
  }
}

TEST(Kraus, StinespringOrderingAndErrors) {
  Rng rng(5);
  const ComplexMatrix xi = random_gaussian(rng, 6, 2);  // F = C^3, L = C^2
  const CPMap z = cpmap_from_isometry(3, xi);
  const ComplexMatrix x = random_gaussian(rng, 3, 3);
  const ComplexMatrix expected = xi.adjoint() * kron(ComplexMatrix::Identity(2, 2), x) * xi;
  EXPECT_LE(residual(represent(apply(z, decompose(z.source, x))), expected), 1e-12);
  expect_error(ErrorKind::ShapeMismatch, [&] { cpmap_from_isometry(4, xi); });
  expect_error(ErrorKind::NotFullAlgebra, [] { kraus_decomposition(averaging::map()); });
}

}  // namespace
}  // namespace wtdil
