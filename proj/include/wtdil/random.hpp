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

// Seeded generators for algebras, unital CP maps and covariant instances.

#ifndef WTDIL_RANDOM_HPP
#define WTDIL_RANDOM_HPP

#include <random>
#include <utility>
#include <vector>

#include "wtdil/duality.hpp"

namespace wtdil {

using Rng = std::mt19937_64;

inline ComplexMatrix random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline ComplexVector random_unit_vector(Rng& rng, Eigen::Index n) {
  ComplexVector v = random_gaussian(rng, n, 1).col(0);
  return v / v.norm();
}

inline ComplexMatrix random_hermitian(Rng& rng, Eigen::Index n) {
  const ComplexMatrix m = random_gaussian(rng, n, n);
  return 0.5 * (m + m.adjoint());
}

inline ComplexMatrix random_unitary(Rng& rng, Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_gaussian(rng, n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline AlgebraElement random_element(Rng& rng, const MatrixBlockAlgebra& alg) {
  return AlgebraElement::from_coordinates(alg, random_gaussian(rng, alg.coord_dim(), 1).col(0));
}

/// Random block list with ambient dimension between 1 and max_ambient.
inline MatrixBlockAlgebra random_algebra(Rng& rng, Eigen::Index max_ambient) {
  std::uniform_int_distribution<Eigen::Index> total_dist(1, max_ambient);
  Eigen::Index remaining = total_dist(rng);
  std::vector<Block> blocks;
  while (remaining > 0) {
    std::uniform_int_distribution<Eigen::Index> dim_dist(1, remaining);
    const Eigen::Index d = dim_dist(rng);
    std::uniform_int_distribution<Eigen::Index> mult_dist(1, remaining / d);
    const Eigen::Index m = mult_dist(rng);
    blocks.push_back({d, m});
    remaining -= d * m;
  }
  return make_algebra(std::move(blocks));
}

/// One to three blocks with dim == mult (square_blocks) or mult >= dim, so
/// that generic vectors are cyclic for the algebra or for its commutant.
inline MatrixBlockAlgebra random_standard_algebra(Rng& rng, Eigen::Index max_ambient, bool square_blocks) {
  std::vector<Block> blocks;
  Eigen::Index used = 0;
  std::uniform_int_distribution<int> count_dist(1, 3);
  const int count = count_dist(rng);
  for (int i = 0; i < count; ++i) {
    const Eigen::Index left = max_ambient - used;
    if (left < 1) break;
    Eigen::Index d_max = 1;
    while ((d_max + 1) * (d_max + 1) <= left) ++d_max;
    std::uniform_int_distribution<Eigen::Index> dim_dist(1, d_max);
    const Eigen::Index d = dim_dist(rng);
    Eigen::Index m = d;
    if (!square_blocks) {
      std::uniform_int_distribution<Eigen::Index> mult_dist(d, left / d);
      m = mult_dist(rng);
    }
    blocks.push_back({d, m});
    used += d * m;
  }
  return make_algebra(std::move(blocks));
}

/// S = E_B o (a -> sum_k W_k* a W_k) with sum_k W_k* W_k = 1 and E_B the
/// trace-normalized conditional expectation onto B.
inline CPMap random_unital_cp_map(Rng& rng, const MatrixBlockAlgebra& a, const MatrixBlockAlgebra& b,
                                  int max_kraus = 3) {
  std::uniform_int_distribution<int> kraus_dist(1, max_kraus);
  const Eigen::Index nf = a.ambient_dim();
  const Eigen::Index ng = b.ambient_dim();
  // sum W_k* W_k must be invertible on G.
  const int n = std::max<int>(kraus_dist(rng), static_cast<int>((ng + nf - 1) / nf));
  std::vector<ComplexMatrix> w;
  ComplexMatrix t = ComplexMatrix::Zero(ng, ng);
  for (int k = 0; k < n; ++k) {
    w.push_back(random_gaussian(rng, nf, ng));
    t += w.back().adjoint() * w.back();
  }
  const ComplexMatrix t_inv_sqrt = psd_functions(t).pinv_sqrt;
  for (auto& x : w) x = x * t_inv_sqrt;
  return cpmap_from_function(a, b, [&](const AlgebraElement& x) {
    const ComplexMatrix m = represent(x);
    ComplexMatrix out = ComplexMatrix::Zero(ng, ng);
    for (const auto& wk : w) out += wk.adjoint() * m * wk;
    return represent(project(b, out).element);
  });
}

inline CPMap random_unital_cp_map(Rng& rng, Eigen::Index max_ambient) {
  const MatrixBlockAlgebra a = random_algebra(rng, max_ambient);
  const MatrixBlockAlgebra b = random_algebra(rng, max_ambient);
  return random_unital_cp_map(rng, a, b);
}

/// Unit vector f with phi_f = omega for a state omega on an algebra whose
/// blocks have dim == mult: in block i, f = vec(rho_i^{1/2}).
inline ComplexVector purify_state(const MatrixBlockAlgebra& a, const std::vector<ComplexMatrix>& densities) {
  ComplexVector f = ComplexVector::Zero(a.ambient_dim());
  for (std::size_t i = 0; i < a.num_blocks(); ++i) {
    const Block& blk = a.blocks()[i];
    const ComplexMatrix root = psd_functions(densities[i], 1e-14).sqrt;
    for (Eigen::Index u = 0; u < blk.dim; ++u)
      for (Eigen::Index mu = 0; mu < blk.mult; ++mu) f(a.ambient_index(i, u, mu)) = root(u, mu);
  }
  return f;
}

/// A covariant instance (S, f, g) with f cyclic for A and g cyclic for B'.
/// Retries until both cyclicity checks pass.
inline DualityContext random_covariant_instance(Rng& rng, Eigen::Index max_ambient) {
  for (;;) {
    const MatrixBlockAlgebra a = random_standard_algebra(rng, max_ambient, true);
    const MatrixBlockAlgebra b = random_standard_algebra(rng, max_ambient, false);
    const CPMap s = random_unital_cp_map(rng, a, b);
    const ComplexVector g = random_unit_vector(rng, b.ambient_dim());
    const VectorState phi_g(g);
    std::vector<ComplexMatrix> densities;
    for (std::size_t i = 0; i < a.num_blocks(); ++i) {
      const Eigen::Index d = a.blocks()[i].dim;
      ComplexMatrix rho(d, d);
      for (Eigen::Index u = 0; u < d; ++u)
        for (Eigen::Index v = 0; v < d; ++v) {
          const Eigen::Index k = a.coord_offset(i) + v * d + u;
          rho(u, v) = phi_g(represent(apply(s, AlgebraElement::basis(a, k))));
        }
      densities.push_back(0.5 * (rho + rho.adjoint()));
    }
    const ComplexVector f = purify_state(a, densities);
    if (std::abs(f.norm() - 1.0) > 1e-9) continue;
    DualityContext ctx = build_context(s, f / f.norm(), g);
    if (ctx.covariant && ctx.f_cyclic_for_A && ctx.g_cyclic_for_Bprime) return ctx;
  }
}

}  // namespace wtdil

#endif  // WTDIL_RANDOM_HPP
