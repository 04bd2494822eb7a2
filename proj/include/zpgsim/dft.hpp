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

#ifndef ZPGSIM_DFT_HPP
#define ZPGSIM_DFT_HPP

#include <vector>

#include "zpgsim/types.hpp"

namespace zpgsim {
namespace detail {

/// Multi-dimensional inverse transform over a row-major array:
///
///   out(n) = (1 / prod N_j) * sum_k in(k) * exp(-2 pi i sum_j n_j k_j / N_j)
///
/// which inverts generating values sampled at z_j^-1 = exp(+2 pi i k_j/N_j).
/// T needs copy, T."+= T", and T "* Complex" (Complex and Eigen matrices
/// both qualify). Grid sizes here are small, so an explicit per-axis
/// transform is used; it is exactly the FFT result without reordering
/// constraints on N_j.
template <class T>
void inverse_grid_transform(std::vector<T>& data, const std::vector<int>& dims) {
  std::size_t expected = 1;
  for (int n : dims) expected *= static_cast<std::size_t>(n);
  require(data.size() == expected, "inverse_grid_transform: size mismatch");

  std::size_t stride = data.size();
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    const int n = dims[axis];
    stride /= static_cast<std::size_t>(n);
    if (n == 1) continue;
    std::vector<Complex> twiddle(static_cast<std::size_t>(n) * n);
    for (int out = 0; out < n; ++out)
      for (int in = 0; in < n; ++in)
        twiddle[static_cast<std::size_t>(out) * n + in] =
            std::polar(1.0 / n, -2.0 * kPi * ((static_cast<long long>(out) * in) % n) / n);

    std::vector<T> lane(static_cast<std::size_t>(n), data.front());
    const std::size_t block = stride * static_cast<std::size_t>(n);
    for (std::size_t base = 0; base < data.size(); base += block) {
      for (std::size_t off = 0; off < stride; ++off) {
        for (int out = 0; out < n; ++out) {
          T acc = data[base + off] * twiddle[static_cast<std::size_t>(out) * n];
          for (int in = 1; in < n; ++in)
            acc += data[base + off + static_cast<std::size_t>(in) * stride] *
                   twiddle[static_cast<std::size_t>(out) * n + in];
          lane[static_cast<std::size_t>(out)] = acc;
        }
        for (int out = 0; out < n; ++out)
          data[base + off + static_cast<std::size_t>(out) * stride] =
              lane[static_cast<std::size_t>(out)];
      }
    }
  }
}

}  // namespace detail
}  // namespace zpgsim

#endif  // ZPGSIM_DFT_HPP
