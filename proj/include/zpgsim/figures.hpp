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

#ifndef ZPGSIM_FIGURES_HPP
#define ZPGSIM_FIGURES_HPP

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "zpgsim/decompose.hpp"

namespace zpgsim {

struct FomEstimate {
  double value = 0.0;
  /// Difference between the two raw finite-difference estimates feeding the
  /// extrapolation; a cheap truncation-error gauge.
  double error_gauge = 0.0;
};

/// Zero-photon probability with every detector at the same real virtual
/// efficiency eta.
inline double zero_photon_probability(const EmitterNetwork& network, double eta,
                                      const PropagationSettings& settings_in) {
  const PropagationSettings settings = resolve_horizon(settings_in, network);
  const auto config = VirtualDetectorConfig::from_efficiencies(
      std::vector<Complex>(static_cast<std::size_t>(network.modes()), Complex(eta)));
  const Matrix rho = propagate(build_zpg(network, config), network.joint_initial_state(), settings);
  return rho.trace().real();
}

/// Mean detected photon number at physical efficiency eta, from the limit
/// mu(eta) = lim_{s -> 0} (1 - p0_{s*eta}) / s, evaluated at eta_step and
/// eta_step/2 with one Richardson extrapolation. For M > 1 all detectors are
/// scaled together, giving the total mean count.
inline FomEstimate mean_photon_number(const EmitterNetwork& network, double eta,
                                      const PropagationSettings& settings, double eta_step = 1e-3) {
  require(eta_step > 0.0 && eta_step <= 1e-2,
          "mean_photon_number: eta_step must be in (0, 1e-2]");
  const double d_h = (1.0 - zero_photon_probability(network, eta_step * eta, settings)) / eta_step;
  const double d_h2 =
      (1.0 - zero_photon_probability(network, 0.5 * eta_step * eta, settings)) / (0.5 * eta_step);
  return {2.0 * d_h2 - d_h, std::abs(d_h - d_h2)};
}

/// Integrated intensity autocorrelation of a single collected mode:
///
///   g2 = (4 / mu^2) lim_{eta -> 0} (1 - 2 p0_{eta/2} + p0_eta) / eta^2
///
/// Three ZPG solves (p0 at eta, eta/2, eta/4) give the second difference at
/// two step sizes plus the mean photon number; the returned value is the
/// step-halving Richardson extrapolation and the gauge the difference of the
/// two raw estimates.
inline FomEstimate g2(const EmitterNetwork& network, const PropagationSettings& settings,
                      double eta_step = 1e-2) {
  require(network.modes() == 1, "g2: defined for a single collected mode");
  require(eta_step > 0.0 && eta_step <= 0.5, "g2: eta_step must be in (0, 0.5]");
  const double p_h = zero_photon_probability(network, eta_step, settings);
  const double p_h2 = zero_photon_probability(network, 0.5 * eta_step, settings);
  const double p_h4 = zero_photon_probability(network, 0.25 * eta_step, settings);

  const double d_h = (1.0 - p_h) / eta_step;
  const double d_h2 = (1.0 - p_h2) / (0.5 * eta_step);
  const double d_h4 = (1.0 - p_h4) / (0.25 * eta_step);
  const double mu = (8.0 * d_h4 - 6.0 * d_h2 + d_h) / 3.0;  // two Richardson levels
  if (std::abs(mu) < 1e-12) throw NumericalError("g2: mean photon number below 1e-12, undefined");

  const double r_h = (1.0 - 2.0 * p_h2 + p_h) / (eta_step * eta_step);
  const double r_h2 = (1.0 - 2.0 * p_h4 + p_h2) / (0.25 * eta_step * eta_step);
  const double g_h = 4.0 * r_h / (mu * mu);
  const double g_h2 = 4.0 * r_h2 / (mu * mu);
  return {2.0 * g_h2 - g_h, std::abs(g_h - g_h2)};
}

/// Coincidence probability beta^(1,1) after interference of two sources at a
/// balanced splitter (convention U = [[1,1],[1,-1]]/sqrt(2)); the twin
/// defaults to an identical copy of `source`. Mismatched twins (detuned,
/// reshaped, or vacuum) give distinguishable references.
inline double hom_coincidence(const SourceSpec& source,
                              const std::optional<SourceSpec>& twin,
                              const PropagationSettings& settings) {
  Matrix splitter(2, 2);
  splitter << 1, 1, 1, -1;
  splitter /= std::sqrt(2.0);
  EmitterNetwork network({source, twin.value_or(source)}, splitter);
  GeneratingTable corners = batch_generating_solutions(
      network, threshold_corner_grid(2), resolve_horizon(settings, network));
  return threshold_distribution(corners).prob({1, 1});
}

/// Photon-number parity sum((-1)^n p(n)) of a single detector, read off one
/// generating trace at z = -1 (eta = 2).
inline double parity(const EmitterNetwork& network, const PropagationSettings& settings_in) {
  require(network.modes() == 1, "parity: defined for a single detector");
  const PropagationSettings settings = resolve_horizon(settings_in, network);
  const auto config = VirtualDetectorConfig::from_z_inverse({Complex(-1.0)});
  const Matrix rho = propagate(build_zpg(network, config), network.joint_initial_state(), settings);
  return rho.trace().real();
}

/// Total variation distance over the union of supports.
inline double tvd(const PhotonNumberDistribution& p, const PhotonNumberDistribution& q) {
  require(p.detectors() == q.detectors(), "tvd: detector counts differ");
  const auto pm = p.as_map();
  const auto qm = q.as_map();
  double acc = 0.0;
  for (const auto& [n, value] : pm) {
    const auto it = qm.find(n);
    acc += std::abs(value - (it == qm.end() ? 0.0 : it->second));
  }
  for (const auto& [n, value] : qm)
    if (!pm.count(n)) acc += std::abs(value);
  return 0.5 * acc;
}

inline double tvd(const ThresholdDistribution& p, const ThresholdDistribution& q) {
  require(p.detectors == q.detectors, "tvd: detector counts differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) acc += std::abs(p.probs[i] - q.probs[i]);
  return 0.5 * acc;
}

}  // namespace zpgsim

#endif  // ZPGSIM_FIGURES_HPP
