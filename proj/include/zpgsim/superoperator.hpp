// Copyright 2026 The zpgsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ZPGSIM_SUPEROPERATOR_HPP
#define ZPGSIM_SUPEROPERATOR_HPP

#include <utility>

#include "zpgsim/hilbert.hpp"
#include "zpgsim/types.hpp"

namespace zpgsim {

/// Column-stacking vectorization: column j of rho becomes entries
/// [j*d, (j+1)*d) of the result.
inline Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvectorize(const Vector& v, int dim) {
  require(v.size() == static_cast<Eigen::Index>(dim) * dim, "unvectorize: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

/// Linear map on operators, stored as a dense matrix acting on
/// column-vectorized density matrices. Under column stacking the map
/// rho -> A rho B has matrix B^T (x) A.
class Superoperator {
 public:
  Superoperator(HilbertSpace space, Matrix action)
      : space_(std::move(space)), action_(std::move(action)) {
    const Eigen::Index d2 =
        static_cast<Eigen::Index>(space_.total_dim()) * space_.total_dim();
    require(action_.rows() == d2 && action_.cols() == d2,
            "Superoperator: action must be total_dim^2 x total_dim^2");
  }

  static Superoperator zero(const HilbertSpace& space) {
    const Eigen::Index d2 = static_cast<Eigen::Index>(space.total_dim()) * space.total_dim();
    return Superoperator(space, Matrix::Zero(d2, d2));
  }

  static Superoperator identity(const HilbertSpace& space) {
    const Eigen::Index d2 = static_cast<Eigen::Index>(space.total_dim()) * space.total_dim();
    return Superoperator(space, Matrix::Identity(d2, d2));
  }

  const HilbertSpace& space() const { return space_; }
  const Matrix& action() const { return action_; }

  Matrix apply(const Matrix& rho) const {
    require(rho.rows() == space_.total_dim() && rho.cols() == space_.total_dim(),
            "Superoperator::apply: state dimension mismatch");
    return unvectorize(action_ * vectorize(rho), space_.total_dim());
  }

  Superoperator& operator+=(const Superoperator& other) {
    require(space_ == other.space_, "Superoperator: space mismatch");
    action_ += other.action_;
    return *this;
  }

  Superoperator& operator-=(const Superoperator& other) {
    require(space_ == other.space_, "Superoperator: space mismatch");
    action_ -= other.action_;
    return *this;
  }

  friend Superoperator operator+(Superoperator a, const Superoperator& b) { return a += b; }
  friend Superoperator operator-(Superoperator a, const Superoperator& b) { return a -= b; }
  friend Superoperator operator*(Complex scale, Superoperator s) {
    s.action_ *= scale;
    return s;
  }

 private:
  HilbertSpace space_;
  Matrix action_;
};

/// rho -> -i (H rho - rho H) for Hermitian H. Non-Hermitian input is
/// rejected; complex effective Hamiltonians only arise inside zero-photon
/// generators, which are assembled from jump terms instead.
inline Superoperator commutator_superop(const OperatorMatrix& h) {
  require(is_hermitian(h.entries, 1e-10),
          "commutator_superop: Hamiltonian is not Hermitian to tolerance 1e-10 "
          "(max deviation " +
              std::to_string(max_abs(h.entries - h.entries.adjoint())) + ")");
  const int d = h.space.total_dim();
  const Matrix eye = Matrix::Identity(d, d);
  Matrix action = Complex(0, -1) * (kron(eye, h.entries) - kron(h.entries.transpose(), eye));
  return Superoperator(h.space, std::move(action));
}

/// rho -> c rho c^dag - {c^dag c, rho}/2.
inline Superoperator dissipator_superop(const OperatorMatrix& c) {
  const int d = c.space.total_dim();
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix cdc = c.entries.adjoint() * c.entries;
  Matrix action = kron(c.entries.conjugate(), c.entries) -
                  0.5 * (kron(eye, cdc) + kron(cdc.transpose(), eye));
  return Superoperator(c.space, std::move(action));
}

/// rho -> a rho b^dag.
inline Superoperator sandwich_superop(const OperatorMatrix& a, const OperatorMatrix& b) {
  require(a.space == b.space, "sandwich_superop: operators live on different spaces");
  return Superoperator(a.space, kron(b.entries.conjugate(), a.entries));
}

}  // namespace zpgsim

#endif  // ZPGSIM_SUPEROPERATOR_HPP
