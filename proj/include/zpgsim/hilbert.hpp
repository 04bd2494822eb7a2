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

#ifndef ZPGSIM_HILBERT_HPP
#define ZPGSIM_HILBERT_HPP

#include <numeric>
#include <vector>

#include "zpgsim/types.hpp"

namespace zpgsim {

/// Tensor-product Hilbert space of a chain of local subsystems.
///
/// Slot 0 is the leftmost tensor factor; the joint basis is ordered
/// row-major over the local indices, so slot 0 is the most significant
/// digit of a joint basis index. A local dimension of 1 is a vacuum
/// placeholder subsystem.
class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
    require(!dims_.empty(), "HilbertSpace: need at least one subsystem");
    for (int d : dims_) require(d >= 1, "HilbertSpace: local dimension must be >= 1");
    total_dim_ = std::accumulate(dims_.begin(), dims_.end(), 1, std::multiplies<int>());
  }

  int slots() const { return static_cast<int>(dims_.size()); }
  int dim(int slot) const { return dims_.at(static_cast<std::size_t>(slot)); }
  int total_dim() const { return total_dim_; }
  const std::vector<int>& dims() const { return dims_; }

  friend bool operator==(const HilbertSpace& a, const HilbertSpace& b) {
    return a.dims_ == b.dims_;
  }

 private:
  std::vector<int> dims_;
  int total_dim_;
};

/// Operator on a joint Hilbert space, stored as a dense complex matrix.
struct OperatorMatrix {
  OperatorMatrix(HilbertSpace sp, Matrix m) : space(std::move(sp)), entries(std::move(m)) {
    require(entries.rows() == entries.cols(), "OperatorMatrix: matrix must be square");
    require(entries.rows() == space.total_dim(),
            "OperatorMatrix: matrix dimension does not match the space");
  }

  HilbertSpace space;
  Matrix entries;
};

/// Embeds a local operator into slot `slot` of the joint space:
/// I (x) ... (x) local_op (x) ... (x) I.
inline OperatorMatrix embed_operator(const Matrix& local_op, int slot, const HilbertSpace& space) {
  require(slot >= 0 && slot < space.slots(), "embed_operator: slot out of range");
  require(local_op.rows() == local_op.cols(), "embed_operator: local operator must be square");
  require(local_op.rows() == space.dim(slot),
          "embed_operator: operator dimension does not match slot dimension");
  int left = 1, right = 1;
  for (int s = 0; s < slot; ++s) left *= space.dim(s);
  for (int s = slot + 1; s < space.slots(); ++s) right *= space.dim(s);
  Matrix out = kron(Matrix::Identity(left, left), kron(local_op, Matrix::Identity(right, right)));
  return OperatorMatrix(space, std::move(out));
}

}  // namespace zpgsim

#endif  // ZPGSIM_HILBERT_HPP
