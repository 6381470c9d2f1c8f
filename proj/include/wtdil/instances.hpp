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

// Built-in instance: the averaging map S(a) = (a_1 + a_2)/2 (1, 1) on the
// diagonal algebra C^2, with its three-element seed and closed-form j.

#ifndef WTDIL_INSTANCES_HPP
#define WTDIL_INSTANCES_HPP

#include <cmath>
#include <vector>

#include "wtdil/duality.hpp"

namespace wtdil::averaging {

inline MatrixBlockAlgebra diagonal_c2() { return make_algebra({{1, 1}, {1, 1}}); }

inline AlgebraElement diag(Complex a1, Complex a2) {
  const MatrixBlockAlgebra alg = diagonal_c2();
  ComplexVector c(2);
  c << a1, a2;
  return AlgebraElement::from_coordinates(alg, c);
}

inline CPMap map() {
  ComplexMatrix action(2, 2);
  action.setConstant(0.5);
  return make_cpmap(diagonal_c2(), diagonal_c2(), action);
}

/// e_0 = 1 (x) 1, e_1 = (1, -1) (x) p_1, e_2 = (1, -1) (x) p_2.
inline std::vector<ModuleElementSpec> seed() {
  const AlgebraElement one = diag(1.0, 1.0);
  const AlgebraElement minus = diag(1.0, -1.0);
  return {{{one, one}}, {{minus, diag(1.0, 0.0)}}, {{minus, diag(0.0, 1.0)}}};
}

/// Closed form of j(a) on G (x) K, K = C^3:
///   1/2 [[a1+a2, (a1-a2) p1, (a1-a2) p2],
///        [(a1-a2) p1, (a1+a2) p1, 0],
///        [(a1-a2) p2, 0, (a1+a2) p2]].
inline ComplexMatrix expected_j(Complex a1, Complex a2) {
  const ComplexMatrix one = ComplexMatrix::Identity(2, 2);
  ComplexMatrix p1 = ComplexMatrix::Zero(2, 2), p2 = ComplexMatrix::Zero(2, 2);
  p1(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  const Complex s = 0.5 * (a1 + a2);
  const Complex t = 0.5 * (a1 - a2);
  ComplexMatrix j = ComplexMatrix::Zero(6, 6);
  j.block(0, 0, 2, 2) = s * one;
  j.block(0, 2, 2, 2) = t * p1;
  j.block(0, 4, 2, 2) = t * p2;
  j.block(2, 0, 2, 2) = t * p1;
  j.block(2, 2, 2, 2) = s * p1;
  j.block(4, 0, 2, 2) = t * p2;
  j.block(4, 4, 2, 2) = s * p2;
  return j;
}

/// p_I = diag(1, p_1, p_2).
inline ComplexMatrix expected_p_I() { return expected_j(1.0, 1.0); }

inline ComplexVector uniform() { return ComplexVector::Constant(2, Complex(1.0 / std::sqrt(2.0), 0.0)); }

inline DualityContext context() { return build_context(map(), uniform(), uniform()); }

}  // namespace wtdil::averaging

#endif  // WTDIL_INSTANCES_HPP
