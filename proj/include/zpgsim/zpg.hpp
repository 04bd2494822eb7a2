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

#ifndef ZPGSIM_ZPG_HPP
#define ZPGSIM_ZPG_HPP

#include <cmath>

#include "zpgsim/network.hpp"
#include "zpgsim/virtual_grid.hpp"

namespace zpgsim {

/// Circuit-transformed efficiency matrix  eta' = U^dag diag(eta) U.
/// Lossless markers resolve to eta = 1 before the product.
inline Matrix effective_efficiency_matrix(const EmitterNetwork& network,
                                          const VirtualDetectorConfig& config) {
  const int m = network.modes();
  require(config.detectors() == m, "effective_efficiency_matrix: detector count mismatch");
  Matrix diag = Matrix::Zero(m, m);
  for (int j = 0; j < m; ++j) diag(j, j) = config.efficiency(j);
  return network.unitary().adjoint() * diag * network.unitary();
}

/// Zero-photon generator for one virtual detector configuration:
///
///   L_z = L - sum_ij eta'_ij sqrt(gamma_i gamma_j) (rho -> c_j rho c_i^dag)
///
/// For M = 1 this reduces to L - eta*gamma*(rho -> c rho c^dag). The
/// detection coupling is time-independent, so only the constant part of the
/// Lindbladian is shifted.
inline TimeDependentGenerator build_zpg(const EmitterNetwork& network,
                                        const VirtualDetectorConfig& config) {
  const int m = network.modes();
  require(config.detectors() == m, "build_zpg: detector count mismatch");
  const Matrix eta_eff = effective_efficiency_matrix(network, config);
  const HilbertSpace& space = network.space();
  const int d = space.total_dim();

  Matrix coupling = Matrix::Zero(static_cast<Eigen::Index>(d) * d,
                                 static_cast<Eigen::Index>(d) * d);
  // Accumulate weight * conj(c_i) (x) c_j blockwise; the embedded collection
  // operators are mostly zero, so skipping empty blocks avoids building M^2
  // dense d^2 x d^2 temporaries.
  for (int i = 0; i < m; ++i) {
    const double gi = network.collection_rate(i);
    if (gi == 0.0) continue;
    const Matrix& ci = network.embedded_collection_op(i);
    for (int j = 0; j < m; ++j) {
      const double gj = network.collection_rate(j);
      if (gj == 0.0) continue;
      const Matrix& cj = network.embedded_collection_op(j);
      const Complex weight = eta_eff(i, j) * std::sqrt(gi * gj);
      if (weight == Complex(0.0)) continue;
      // rho -> c_j rho c_i^dag has matrix conj(c_i) (x) c_j.
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          const Complex left = weight * std::conj(ci(r, c));
          if (left == Complex(0.0)) continue;
          coupling.block(static_cast<Eigen::Index>(r) * d, static_cast<Eigen::Index>(c) * d, d, d) +=
              left * cj;
        }
    }
  }
  return network.total_lindbladian().minus_constant(Superoperator(space, std::move(coupling)));
}

}  // namespace zpgsim

#endif  // ZPGSIM_ZPG_HPP
