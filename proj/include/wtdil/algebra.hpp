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

// Finite-dimensional von Neumann algebras in standard form.
//
// An algebra is a list of blocks (d_i, m_i) acting on C^N, N = sum d_i m_i, as
// the direct sum of M_{d_i} (x) I_{m_i}. Ambient indices are block-major; inside
// a block the ambient index is (d-index, m-index) with the d-leg slow. The
// commutant lives on the same ambient space with blocks (m_i, d_i) and the
// element leg fast, which is recorded as LegOrder::MultMajor.
//
// Coordinates of an element are the entries of its block matrices, block-major
// and row-major inside a block; the coordinate basis is the set of matrix units.

#ifndef WTDIL_ALGEBRA_HPP
#define WTDIL_ALGEBRA_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "wtdil/numerics.hpp"

namespace wtdil {

inline constexpr Eigen::Index kDefaultAmbientCap = 64;
inline constexpr double kMembershipTol = 1e-9;

struct Block {
  Eigen::Index dim = 1;
  Eigen::Index mult = 1;
  friend bool operator==(const Block&, const Block&) = default;
};

enum class LegOrder { DimMajor, MultMajor };

class MatrixBlockAlgebra {
 public:
  MatrixBlockAlgebra() = default;

  const std::vector<Block>& blocks() const { return blocks_; }
  LegOrder leg_order() const { return order_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  Eigen::Index ambient_dim() const { return ambient_dim_; }
  Eigen::Index coord_dim() const { return coord_dim_; }
  Eigen::Index ambient_offset(std::size_t i) const { return ambient_offsets_[i]; }
  Eigen::Index coord_offset(std::size_t i) const { return coord_offsets_[i]; }

  /// Ambient index of (element index u, multiplicity index mu) in block i.
  Eigen::Index ambient_index(std::size_t i, Eigen::Index u, Eigen::Index mu) const {
    const Block& b = blocks_[i];
    return ambient_offsets_[i] + (order_ == LegOrder::DimMajor ? u * b.mult + mu : mu * b.dim + u);
  }

  /// Block index and (row, col) inside the block of coordinate k.
  struct CoordRef {
    std::size_t block;
    Eigen::Index row;
    Eigen::Index col;
  };
  CoordRef coord_ref(Eigen::Index k) const {
    std::size_t i = 0;
    while (i + 1 < blocks_.size() && coord_offsets_[i + 1] <= k) ++i;
    const Eigen::Index local = k - coord_offsets_[i];
    return {i, local / blocks_[i].dim, local % blocks_[i].dim};
  }

  bool is_full() const { return blocks_.size() == 1 && blocks_[0].mult == 1; }

  /// Same blocks embedded at the same ambient positions. The leg order only
  /// matters for blocks with dim > 1 and mult > 1.
  friend bool operator==(const MatrixBlockAlgebra& a, const MatrixBlockAlgebra& b) {
    if (a.blocks_ != b.blocks_) return false;
    if (a.order_ == b.order_) return true;
    for (const Block& blk : a.blocks_)
      if (blk.dim > 1 && blk.mult > 1) return false;
    return true;
  }

  static MatrixBlockAlgebra create(std::vector<Block> blocks, LegOrder order) {
    MatrixBlockAlgebra alg;
    alg.blocks_ = std::move(blocks);
    alg.order_ = order;
    for (const Block& b : alg.blocks_) {
      alg.ambient_offsets_.push_back(alg.ambient_dim_);
      alg.coord_offsets_.push_back(alg.coord_dim_);
      alg.ambient_dim_ += b.dim * b.mult;
      alg.coord_dim_ += b.dim * b.dim;
    }
    return alg;
  }

 private:
  std::vector<Block> blocks_;
  LegOrder order_ = LegOrder::DimMajor;
  std::vector<Eigen::Index> ambient_offsets_;
  std::vector<Eigen::Index> coord_offsets_;
  Eigen::Index ambient_dim_ = 0;
  Eigen::Index coord_dim_ = 0;
};

inline MatrixBlockAlgebra make_algebra(std::vector<Block> blocks,
                                       Eigen::Index cap = kDefaultAmbientCap) {
  if (blocks.empty()) throw Error(ErrorKind::ShapeMismatch, "make_algebra: no blocks");
  Eigen::Index ambient = 0;
  for (const Block& b : blocks) {
    if (b.dim < 1 || b.mult < 1) {
      throw Error(ErrorKind::ShapeMismatch, "make_algebra: block dims must be >= 1");
    }
    ambient += b.dim * b.mult;
  }
  if (ambient > cap) {
    throw Error(ErrorKind::DimensionCap, "make_algebra: ambient dimension " +
                                             std::to_string(ambient) + " exceeds cap " +
                                             std::to_string(cap));
  }
  return MatrixBlockAlgebra::create(std::move(blocks), LegOrder::DimMajor);
}

/// B(C^n) as the single block (n, 1).
inline MatrixBlockAlgebra full_algebra(Eigen::Index n) { return make_algebra({{n, 1}}); }

inline MatrixBlockAlgebra commutant(const MatrixBlockAlgebra& alg) {
  std::vector<Block> swapped;
  swapped.reserve(alg.num_blocks());
  for (const Block& b : alg.blocks()) swapped.push_back({b.mult, b.dim});
  return MatrixBlockAlgebra::create(
      std::move(swapped),
      alg.leg_order() == LegOrder::DimMajor ? LegOrder::MultMajor : LegOrder::DimMajor);
}

class AlgebraElement {
 public:
  AlgebraElement() = default;
  explicit AlgebraElement(MatrixBlockAlgebra owner) : owner_(std::move(owner)) {
    for (const Block& b : owner_.blocks()) blocks_.push_back(ComplexMatrix::Zero(b.dim, b.dim));
  }
  AlgebraElement(MatrixBlockAlgebra owner, std::vector<ComplexMatrix> blocks)
      : owner_(std::move(owner)), blocks_(std::move(blocks)) {
    if (blocks_.size() != owner_.num_blocks()) {
      throw Error(ErrorKind::ShapeMismatch, "AlgebraElement: wrong number of blocks");
    }
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Eigen::Index d = owner_.blocks()[i].dim;
      if (blocks_[i].rows() != d || blocks_[i].cols() != d) {
        throw Error(ErrorKind::ShapeMismatch, "AlgebraElement: block " + std::to_string(i) +
                                                  " has wrong size");
      }
    }
  }

  const MatrixBlockAlgebra& owner() const { return owner_; }
  const std::vector<ComplexMatrix>& blocks() const { return blocks_; }
  ComplexMatrix& block(std::size_t i) { return blocks_[i]; }
  const ComplexMatrix& block(std::size_t i) const { return blocks_[i]; }

  static AlgebraElement identity(const MatrixBlockAlgebra& alg) {
    AlgebraElement x(alg);
    for (auto& b : x.blocks_) b.setIdentity();
    return x;
  }

  static AlgebraElement from_coordinates(const MatrixBlockAlgebra& alg, const ComplexVector& c) {
    if (c.size() != alg.coord_dim()) {
      throw Error(ErrorKind::ShapeMismatch, "from_coordinates: wrong coordinate count");
    }
    AlgebraElement x(alg);
    for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
      const Eigen::Index d = alg.blocks()[i].dim;
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index s = 0; s < d; ++s) x.blocks_[i](r, s) = c(alg.coord_offset(i) + r * d + s);
    }
    return x;
  }

  /// Matrix unit number k of the coordinate basis.
  static AlgebraElement basis(const MatrixBlockAlgebra& alg, Eigen::Index k) {
    AlgebraElement x(alg);
    const auto ref = alg.coord_ref(k);
    x.blocks_[ref.block](ref.row, ref.col) = 1.0;
    return x;
  }

  ComplexVector coordinates() const {
    ComplexVector c(owner_.coord_dim());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const Eigen::Index d = blocks_[i].rows();
      for (Eigen::Index r = 0; r < d; ++r)
        for (Eigen::Index s = 0; s < d; ++s) c(owner_.coord_offset(i) + r * d + s) = blocks_[i](r, s);
    }
    return c;
  }

  AlgebraElement adjoint() const {
    AlgebraElement x(owner_);
    for (std::size_t i = 0; i < blocks_.size(); ++i) x.blocks_[i] = blocks_[i].adjoint();
    return x;
  }

  double norm() const {
    double n = 0.0;
    for (const auto& b : blocks_) n = std::max(n, op_norm(b));
    return n;
  }

  friend AlgebraElement operator*(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a, b);
    AlgebraElement x(a.owner_);
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) x.blocks_[i] = a.blocks_[i] * b.blocks_[i];
    return x;
  }
  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a, b);
    AlgebraElement x(a.owner_);
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) x.blocks_[i] = a.blocks_[i] + b.blocks_[i];
    return x;
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    require_same(a, b);
    AlgebraElement x(a.owner_);
    for (std::size_t i = 0; i < a.blocks_.size(); ++i) x.blocks_[i] = a.blocks_[i] - b.blocks_[i];
    return x;
  }
  friend AlgebraElement operator*(Complex s, const AlgebraElement& a) {
    AlgebraElement x(a);
    for (auto& b : x.blocks_) b *= s;
    return x;
  }

 private:
  static void require_same(const AlgebraElement& a, const AlgebraElement& b) {
    if (!(a.owner_ == b.owner_)) {
      throw Error(ErrorKind::AlgebraMismatch, "elements of different algebras");
    }
  }

  MatrixBlockAlgebra owner_;
  std::vector<ComplexMatrix> blocks_;
};

/// Ambient matrix of x: direct sum of a_i (x) I_{m_i} (legs per owner order).
inline ComplexMatrix represent(const AlgebraElement& x) {
  const MatrixBlockAlgebra& alg = x.owner();
  ComplexMatrix m = ComplexMatrix::Zero(alg.ambient_dim(), alg.ambient_dim());
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const Block& b = alg.blocks()[i];
    for (Eigen::Index u = 0; u < b.dim; ++u)
      for (Eigen::Index v = 0; v < b.dim; ++v) {
        const Complex z = x.block(i)(u, v);
        if (z == Complex(0.0)) continue;
        for (Eigen::Index mu = 0; mu < b.mult; ++mu)
          m(alg.ambient_index(i, u, mu), alg.ambient_index(i, v, mu)) = z;
      }
  }
  return m;
}

inline ComplexMatrix represent_basis(const MatrixBlockAlgebra& alg, Eigen::Index k) {
  return represent(AlgebraElement::basis(alg, k));
}

/// Matrix of left multiplication by a on coordinates.
inline ComplexMatrix left_multiplication(const AlgebraElement& a) {
  const MatrixBlockAlgebra& alg = a.owner();
  ComplexMatrix m(alg.coord_dim(), alg.coord_dim());
  for (Eigen::Index k = 0; k < alg.coord_dim(); ++k)
    m.col(k) = (a * AlgebraElement::basis(alg, k)).coordinates();
  return m;
}

struct Projection {
  AlgebraElement element;
  double residual = 0.0;  // ||M - represent(element)||_F
};

/// Orthogonal (Hilbert-Schmidt) projection of an ambient matrix onto the
/// algebra: block coordinates are partial traces over the multiplicity leg.
inline Projection project(const MatrixBlockAlgebra& alg, const ComplexMatrix& m) {
  if (m.rows() != alg.ambient_dim() || m.cols() != alg.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "project: matrix is not ambient-sized");
  }
  require_finite(m, "project");
  AlgebraElement x(alg);
  for (std::size_t i = 0; i < alg.num_blocks(); ++i) {
    const Block& b = alg.blocks()[i];
    for (Eigen::Index u = 0; u < b.dim; ++u)
      for (Eigen::Index v = 0; v < b.dim; ++v) {
        Complex sum = 0.0;
        for (Eigen::Index mu = 0; mu < b.mult; ++mu)
          sum += m(alg.ambient_index(i, u, mu), alg.ambient_index(i, v, mu));
        x.block(i)(u, v) = sum / static_cast<double>(b.mult);
      }
  }
  const double res = residual(m, represent(x));
  return {std::move(x), res};
}

inline AlgebraElement decompose(const MatrixBlockAlgebra& alg, const ComplexMatrix& m,
                                double tol = kMembershipTol) {
  Projection p = project(alg, m);
  if (p.residual > tol * std::max(1.0, m.norm())) {
    throw Error(ErrorKind::NotInAlgebra, "decompose: matrix is not in the algebra", p.residual);
  }
  return std::move(p.element);
}

/// True iff {x v : x in alg} spans the ambient space.
inline bool is_cyclic(const MatrixBlockAlgebra& alg, const ComplexVector& v,
                      double tol = kDefaultTol) {
  if (v.size() != alg.ambient_dim()) {
    throw Error(ErrorKind::ShapeMismatch, "is_cyclic: vector has wrong dimension");
  }
  ComplexMatrix span(alg.ambient_dim(), alg.coord_dim());
  for (Eigen::Index k = 0; k < alg.coord_dim(); ++k) span.col(k) = represent_basis(alg, k) * v;
  return numerical_rank(span, tol) == alg.ambient_dim();
}

/// Vector state <v, . v> for a unit vector v.
class VectorState {
 public:
  VectorState() = default;
  explicit VectorState(ComplexVector v, double tol = 1e-9) : v_(std::move(v)) {
    require_finite(v_, "VectorState");
    if (std::abs(v_.norm() - 1.0) > tol) {
      throw Error(ErrorKind::ShapeMismatch, "VectorState: vector is not a unit vector",
                  std::abs(v_.norm() - 1.0));
    }
  }

  const ComplexVector& vector() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  Complex operator()(const ComplexMatrix& m) const { return v_.dot(m * v_); }

 private:
  ComplexVector v_;
};

inline ComplexVector basis_vector(Eigen::Index n, Eigen::Index k) {
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  return v;
}

// Operators on G (x) K are stored with the K index slowest: the (j, i) block of
// size dim G is the component along |k_j><k_i|.

/// b (x) c for b on G and c on K.
inline ComplexMatrix tensor_k(const ComplexMatrix& b, const ComplexMatrix& c) { return kron(c, b); }

/// Blockwise projection of an operator on G (x) K onto B (x) B(K).
struct TensorProjection {
  std::vector<AlgebraElement> blocks;  // (j, i) at j * k_dim + i
  double residual = 0.0;
};

inline TensorProjection project_tensor_k(const MatrixBlockAlgebra& b, Eigen::Index k_dim,
                                         const ComplexMatrix& x) {
  const Eigen::Index n = b.ambient_dim();
  if (x.rows() != n * k_dim || x.cols() != n * k_dim) {
    throw Error(ErrorKind::ShapeMismatch, "project_tensor_k: operator has wrong size");
  }
  TensorProjection out;
  double sq = 0.0;
  for (Eigen::Index j = 0; j < k_dim; ++j)
    for (Eigen::Index i = 0; i < k_dim; ++i) {
      Projection p = project(b, x.block(j * n, i * n, n, n));
      sq += p.residual * p.residual;
      out.blocks.push_back(std::move(p.element));
    }
  out.residual = std::sqrt(sq);
  return out;
}

/// P_psi = id_B (x) psi on B (x) B(K), psi the vector state of k.
class ConditionalExpectation {
 public:
  ConditionalExpectation(MatrixBlockAlgebra b, Eigen::Index k_dim, VectorState psi)
      : b_(std::move(b)), k_dim_(k_dim), psi_(std::move(psi)) {
    if (psi_.dim() != k_dim_) {
      throw Error(ErrorKind::ShapeMismatch, "ConditionalExpectation: state lives on wrong space");
    }
  }

  /// sum_{j,i} conj(k_j) k_i X_{ji}, as an operator on G.
  ComplexMatrix apply_ambient(const ComplexMatrix& x) const {
    const Eigen::Index n = b_.ambient_dim();
    if (x.rows() != n * k_dim_ || x.cols() != n * k_dim_) {
      throw Error(ErrorKind::ShapeMismatch, "ConditionalExpectation: operator has wrong size");
    }
    const ComplexVector& k = psi_.vector();
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < k_dim_; ++j)
      for (Eigen::Index i = 0; i < k_dim_; ++i) {
        const Complex w = std::conj(k(j)) * k(i);
        if (w != Complex(0.0)) out += w * x.block(j * n, i * n, n, n);
      }
    return out;
  }

  AlgebraElement operator()(const ComplexMatrix& x, double tol = kMembershipTol) const {
    return decompose(b_, apply_ambient(x), tol);
  }

  const MatrixBlockAlgebra& target() const { return b_; }
  Eigen::Index k_dim() const { return k_dim_; }
  const VectorState& state() const { return psi_; }

 private:
  MatrixBlockAlgebra b_;
  Eigen::Index k_dim_;
  VectorState psi_;
};

inline ConditionalExpectation conditional_expectation(const MatrixBlockAlgebra& b,
                                                      Eigen::Index k_dim, VectorState psi) {
  return ConditionalExpectation(b, k_dim, std::move(psi));
}

}  // namespace wtdil

#endif  // WTDIL_ALGEBRA_HPP
