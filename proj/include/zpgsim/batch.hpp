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

#ifndef ZPGSIM_BATCH_HPP
#define ZPGSIM_BATCH_HPP

#include <atomic>
#include <cmath>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "zpgsim/integrate.hpp"
#include "zpgsim/virtual_grid.hpp"
#include "zpgsim/zpg.hpp"

namespace zpgsim {

/// Generating solutions over a grid of virtual detector configurations:
/// trace[k] = Tr[G_z rho(t0)] at config k, optionally with the generating
/// states G_z rho(t0) and the generating maps G_z themselves.
struct GeneratingTable {
  VirtualGrid grid;
  std::vector<Complex> traces;
  std::vector<Matrix> final_states;
  std::vector<Matrix> final_maps;
  Matrix initial_state;
  double t0 = 0.0;
  double t1 = 0.0;

  bool has_states() const { return !final_states.empty(); }
  bool has_maps() const { return !final_maps.empty(); }
};

struct BatchOptions {
  bool want_states = false;
  bool want_maps = false;
  /// Solve only one config of each conjugate pair and fill the partner from
  /// trace(conj z) = conj(trace(z)); exact for physical networks, where all
  /// conditional propagators are Hermiticity-preserving. Disable to validate.
  bool conjugate_pair_shortcut = true;
  int workers = 1;
};

namespace detail {

/// Column-stacked index permutation of the transpose map, used to conjugate
/// superoperator matrices: map(conj z) = K conj(map(z)) K.
inline Matrix transpose_conjugate_superop(const Matrix& m, int d) {
  Matrix out(m.rows(), m.cols());
  auto swapped = [d](Eigen::Index a) {
    const Eigen::Index i = a % d, j = a / d;
    return j + i * static_cast<Eigen::Index>(d);
  };
  for (Eigen::Index col = 0; col < m.cols(); ++col)
    for (Eigen::Index row = 0; row < m.rows(); ++row)
      out(row, col) = std::conj(m(swapped(row), swapped(col)));
  return out;
}

}  // namespace detail

/// Solves the ZPG for every config in the grid and tabulates the generating
/// traces (and states/maps when requested). Work is distributed over
/// `workers` threads; results are keyed by grid index, so the output is
/// identical for any worker count. A failing config aborts the batch with
/// its index.
inline GeneratingTable batch_generating_solutions(const EmitterNetwork& network,
                                                  const VirtualGrid& grid,
                                                  const PropagationSettings& settings_in,
                                                  const BatchOptions& options = {}) {
  require(grid.detectors() == network.modes(),
          "batch_generating_solutions: grid detector count does not match network");
  const PropagationSettings settings = resolve_horizon(settings_in, network);
  const int d = network.space().total_dim();
  const int total = grid.size();

  GeneratingTable table{grid,
                        std::vector<Complex>(static_cast<std::size_t>(total)),
                        {},
                        {},
                        network.joint_initial_state(),
                        settings.t0,
                        settings.horizon()};
  const bool keep_states = options.want_states || options.want_maps;
  if (keep_states) table.final_states.resize(static_cast<std::size_t>(total));
  if (options.want_maps) table.final_maps.resize(static_cast<std::size_t>(total));

  // Representatives: lowest index of each conjugate pair (or every config
  // when the shortcut is off / the grid has no known pairing).
  std::vector<int> reps;
  std::vector<int> derived_from(static_cast<std::size_t>(total), -1);
  for (int idx = 0; idx < total; ++idx) {
    const int partner = options.conjugate_pair_shortcut ? grid.conjugate_partner(idx) : -1;
    if (partner >= 0 && partner < idx)
      derived_from[static_cast<std::size_t>(idx)] = partner;
    else
      reps.push_back(idx);
  }

  std::vector<std::string> failures(static_cast<std::size_t>(total));
  std::atomic<std::size_t> cursor{0};
  auto solve_one = [&](int idx) {
    const TimeDependentGenerator gen = build_zpg(network, grid.config(idx));
    if (options.want_maps) {
      Matrix map = propagate_map(gen, settings);
      Matrix state = unvectorize(map * vectorize(table.initial_state), d);
      table.traces[static_cast<std::size_t>(idx)] = state.trace();
      table.final_states[static_cast<std::size_t>(idx)] = std::move(state);
      table.final_maps[static_cast<std::size_t>(idx)] = std::move(map);
    } else {
      Matrix state = propagate(gen, table.initial_state, settings);
      table.traces[static_cast<std::size_t>(idx)] = state.trace();
      if (keep_states) table.final_states[static_cast<std::size_t>(idx)] = std::move(state);
    }
  };
  auto worker = [&]() {
    while (true) {
      const std::size_t at = cursor.fetch_add(1);
      if (at >= reps.size()) return;
      const int idx = reps[at];
      try {
        solve_one(idx);
      } catch (const std::exception& e) {
        failures[static_cast<std::size_t>(idx)] = e.what();
      }
    }
  };

  const int workers = std::max(1, options.workers);
  if (workers == 1 || reps.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (int idx = 0; idx < total; ++idx) {
    if (!failures[static_cast<std::size_t>(idx)].empty()) {
      std::ostringstream msg;
      msg << "config " << idx << " failed: " << failures[static_cast<std::size_t>(idx)];
      throw NumericalError(msg.str());
    }
  }

  for (int idx = 0; idx < total; ++idx) {
    const int src = derived_from[static_cast<std::size_t>(idx)];
    if (src < 0) continue;
    table.traces[static_cast<std::size_t>(idx)] =
        std::conj(table.traces[static_cast<std::size_t>(src)]);
    if (keep_states)
      table.final_states[static_cast<std::size_t>(idx)] =
          table.final_states[static_cast<std::size_t>(src)].adjoint();
    if (options.want_maps)
      table.final_maps[static_cast<std::size_t>(idx)] =
          detail::transpose_conjugate_superop(table.final_maps[static_cast<std::size_t>(src)], d);
  }

  for (const Complex& tr : table.traces)
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()))
      throw NumericalError("batch_generating_solutions: non-finite generating trace");
  return table;
}

}  // namespace zpgsim

#endif  // ZPGSIM_BATCH_HPP
