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

#ifndef ZPGSIM_DECOMPOSE_HPP
#define ZPGSIM_DECOMPOSE_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "zpgsim/batch.hpp"
#include "zpgsim/dft.hpp"
#include "zpgsim/distributions.hpp"

namespace zpgsim {

/// Largest residue treated as reconstruction roundoff; beyond it the
/// inversion is flagged as an aliasing failure.
inline constexpr double kAliasingResidueLimit = 1e-4;
/// Negative probabilities no deeper than this are clamped to zero.
inline constexpr double kNegativeClampLimit = 1e-9;

/// Inverts a fourier-grid generating table into the photon-number
/// distribution p(n). Count n_j is the conjugate index of the grid
/// frequency k_j, with overall normalization 1/prod N_j. Imaginary parts
/// are discarded into the residue diagnostic, never silently.
inline PhotonNumberDistribution invert_distribution(const GeneratingTable& table) {
  require(table.grid.kind() == GridKind::fourier,
          "invert_distribution: table must be built on a fourier grid");
  std::vector<Complex> values = table.traces;
  detail::inverse_grid_transform(values, table.grid.truncations());

  PhotonNumberDistribution dist(table.grid.truncations());
  double clamp_total = 0.0;
  for (int flat = 0; flat < dist.size(); ++flat) {
    const Complex v = values[static_cast<std::size_t>(flat)];
    double p = v.real();
    dist.imag_residue(flat) = std::abs(v.imag());
    dist.residue = std::max(dist.residue, std::abs(v.imag()));
    if (p < 0.0 && p >= -kNegativeClampLimit) {
      clamp_total += -p;
      p = 0.0;
    }
    dist[flat] = p;
  }
  dist.residue = std::max(dist.residue, clamp_total);
  dist.tail_mass = dist.edge_tail_mass();
  dist.aliasing_failure = dist.residue > kAliasingResidueLimit;
  return dist;
}

/// Inverts generating states (and maps when present) into conditional
/// states rho^(n) and propagators. States get a Hermitian cleanup
/// (rho + rho^dag)/2 after inversion; the pre-cleanup deviation is recorded.
inline ConditionalStateSet invert_states(const GeneratingTable& table) {
  require(table.grid.kind() == GridKind::fourier,
          "invert_states: table must be built on a fourier grid");
  require(table.has_states() || table.has_maps(),
          "invert_states: table carries neither states nor maps");

  ConditionalStateSet set;
  set.truncations = table.grid.truncations();
  if (table.has_states()) {
    std::vector<Matrix> states = table.final_states;
    detail::inverse_grid_transform(states, table.grid.truncations());
    for (Matrix& rho : states) {
      const double dev = max_abs(rho - rho.adjoint()) / 2.0;
      set.hermiticity_residue = std::max(set.hermiticity_residue, dev);
      rho = ((rho + rho.adjoint()) / 2.0).eval();
    }
    set.states = std::move(states);
  }
  if (table.has_maps()) {
    std::vector<Matrix> maps = table.final_maps;
    detail::inverse_grid_transform(maps, table.grid.truncations());
    set.maps = std::move(maps);
    if (set.states.empty()) {
      const int d = static_cast<int>(table.initial_state.rows());
      set.states.reserve(set.maps.size());
      for (const Matrix& map : set.maps) {
        Matrix rho = unvectorize(map * vectorize(table.initial_state), d);
        const double dev = max_abs(rho - rho.adjoint()) / 2.0;
        set.hermiticity_residue = std::max(set.hermiticity_residue, dev);
        set.states.push_back(((rho + rho.adjoint()) / 2.0).eval());
      }
    }
  }
  return set;
}

/// Threshold-detection distribution from generating traces at the 2^M
/// efficiency corners:
///
///   beta(m) = sum_L trace(L) * prod_i (-1)^(m_i + L_i) (1 - L_i)^(1 - m_i)
///
/// with loss bits L_i = 1 - eta_i and the convention 0^0 = 1. Corners with
/// some L_i = 1 where m_i = 0 drop out, so each beta(m) sums 2^|m| corners.
inline ThresholdDistribution threshold_distribution(const GeneratingTable& table) {
  require(table.grid.kind() == GridKind::threshold_corners,
          "threshold_distribution: table must be built on threshold corners");
  const int m = table.grid.detectors();
  const int total = 1 << m;
  require(table.grid.size() == total, "threshold_distribution: missing corners");

  ThresholdDistribution out;
  out.detectors = m;
  out.probs.assign(static_cast<std::size_t>(total), 0.0);
  for (int mbits = 0; mbits < total; ++mbits) {
    double acc = 0.0;
    for (int lbits = 0; lbits < total; ++lbits) {
      double weight = 1.0;
      for (int i = 0; i < m && weight != 0.0; ++i) {
        const int mi = (mbits >> (m - 1 - i)) & 1;
        const int li = (lbits >> (m - 1 - i)) & 1;
        if (mi == 0 && li == 1) weight = 0.0;          // (1 - L)^(1 - m) = 0
        else if ((mi + li) % 2 == 1) weight = -weight;  // (-1)^(m + L)
      }
      if (weight != 0.0)
        acc += weight * table.traces[static_cast<std::size_t>(lbits)].real();
    }
    out.probs[static_cast<std::size_t>(mbits)] = acc;
  }
  return out;
}

struct AutoTruncationOptions {
  std::vector<int> initial_truncations;
  double tail_tolerance = 1e-9;
  int max_doublings = 4;
  BatchOptions batch;
};

/// Doubles every N_j until the reconstructed edge tail mass falls below the
/// tolerance (or the doubling budget runs out; the returned distribution
/// carries the final diagnostics either way).
inline PhotonNumberDistribution auto_truncated_distribution(const EmitterNetwork& network,
                                                            const PropagationSettings& settings,
                                                            const AutoTruncationOptions& options) {
  std::vector<int> truncations = options.initial_truncations.empty()
                                     ? std::vector<int>(network.modes(), 2)
                                     : options.initial_truncations;
  require(static_cast<int>(truncations.size()) == network.modes(),
          "auto_truncated_distribution: truncation length mismatch");
  for (int round = 0;; ++round) {
    GeneratingTable table =
        batch_generating_solutions(network, fourier_grid(truncations), settings, options.batch);
    PhotonNumberDistribution dist = invert_distribution(table);
    if (dist.tail_mass < options.tail_tolerance || round >= options.max_doublings) return dist;
    for (int& n : truncations) n *= 2;
  }
}

}  // namespace zpgsim

#endif  // ZPGSIM_DECOMPOSE_HPP
