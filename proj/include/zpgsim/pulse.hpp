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

#ifndef ZPGSIM_PULSE_HPP
#define ZPGSIM_PULSE_HPP

#include <functional>
#include <utility>

#include "zpgsim/generator.hpp"
#include "zpgsim/types.hpp"

namespace zpgsim {

enum class PulseKind { square, custom };

/// Drive envelope Omega(t) with integrated area theta over the support
/// [t_start, t_start + tau]. Times are in units of the reference decay rate.
struct PulseShape {
  PulseKind kind;
  double theta;
  double tau;
  double t_start;
  std::function<double(double)> envelope;

  double t_end() const { return t_start + tau; }

  /// Coefficient scale * Omega(t), carrying the support edges as integrator
  /// breakpoints. The usual Rabi convention puts scale = 1/2.
  DriveCoefficient drive_coefficient(double scale = 0.5) const {
    DriveCoefficient out;
    auto env = envelope;
    out.value = [env, scale](double t) { return scale * env(t); };
    out.breakpoints = {t_start, t_end()};
    if (kind == PulseKind::square) {
      out.merge_key = "square:" + key_double(theta) + ":" + key_double(tau) + ":" +
                      key_double(t_start) + ":" + key_double(scale);
    }
    return out;
  }
};

/// Square pulse of area theta: Omega = theta/tau on [t_start, t_start+tau].
inline PulseShape square_pulse(double theta, double tau, double t_start = 0.0) {
  require(tau > 0.0, "square_pulse: tau must be positive");
  const double height = theta / tau;
  const double t_stop = t_start + tau;
  PulseShape out;
  out.kind = PulseKind::square;
  out.theta = theta;
  out.tau = tau;
  out.t_start = t_start;
  out.envelope = [height, t_start, t_stop](double t) {
    return (t >= t_start && t < t_stop) ? height : 0.0;
  };
  return out;
}

/// Arbitrary envelope; theta is taken on trust from the caller (use
/// quadrature of the envelope to validate it where it matters).
inline PulseShape custom_pulse(std::function<double(double)> envelope, double theta, double tau,
                               double t_start = 0.0) {
  require(tau > 0.0, "custom_pulse: tau must be positive");
  PulseShape out;
  out.kind = PulseKind::custom;
  out.theta = theta;
  out.tau = tau;
  out.t_start = t_start;
  out.envelope = std::move(envelope);
  return out;
}

}  // namespace zpgsim

#endif  // ZPGSIM_PULSE_HPP
