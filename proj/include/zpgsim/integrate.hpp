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

#ifndef ZPGSIM_INTEGRATE_HPP
#define ZPGSIM_INTEGRATE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <vector>

#include "zpgsim/generator.hpp"
#include "zpgsim/network.hpp"

namespace zpgsim {

/// Settings for the adaptive explicit Runge-Kutta propagation (embedded
/// Dormand-Prince 5(4); the contract is only "adaptive explicit RK of order
/// >= 4"). Times and rates are in units of the reference decay rate.
struct PropagationSettings {
  double t0 = 0.0;
  std::optional<double> t1;  // nullopt: derive via default_horizon(network)
  double rtol = 1e-10;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();

  double horizon() const {
    require(t1.has_value(), "PropagationSettings: t1 is unset");
    require(*t1 > t0, "PropagationSettings: t1 must exceed t0");
    require(rtol > 0.0 && atol > 0.0, "PropagationSettings: tolerances must be positive");
    return *t1;
  }
};

/// Default integration horizon: last drive edge plus 15 lifetimes of the
/// slowest collected channel, which bounds the residual excited population
/// near exp(-15).
inline double default_horizon(const EmitterNetwork& network) {
  const double gamma = network.min_collection_rate();
  require(std::isfinite(gamma), "default_horizon: network has no collected emission");
  return network.last_drive_breakpoint() + 15.0 / gamma;
}

inline PropagationSettings resolve_horizon(PropagationSettings settings,
                                           const EmitterNetwork& network) {
  if (!settings.t1) settings.t1 = default_horizon(network);
  return settings;
}

namespace detail {

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, double rtol, double atol) {
  const auto scale = (atol + rtol * y0.array().abs().max(y1.array().abs())).eval();
  const double sq = ((err.array().abs() / scale).square()).sum();
  return std::sqrt(sq / static_cast<double>(err.size()));
}

/// One continuous Dormand-Prince 5(4) sweep over [a, b]; the generator's
/// coefficients must be smooth inside the open interval. Stage times are
/// nudged one step into the interval so half-open envelope conventions at
/// the segment edges cannot leak across a discontinuity.
template <class State>
void integrate_segment(const TimeDependentGenerator& gen, State& y, double a, double b,
                       const PropagationSettings& settings) {
  // Intervals below rounding width cannot move the state in double
  // precision; they appear when a drive edge collides with a requested
  // boundary.
  if (b - a <= 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(b), 1.0)) return;
  // clang-format off
  constexpr double c2 = 1.0/5, c3 = 3.0/10, c4 = 4.0/5, c5 = 8.0/9;
  constexpr double a21 = 1.0/5;
  constexpr double a31 = 3.0/40, a32 = 9.0/40;
  constexpr double a41 = 44.0/45, a42 = -56.0/15, a43 = 32.0/9;
  constexpr double a51 = 19372.0/6561, a52 = -25360.0/2187, a53 = 64448.0/6561, a54 = -212.0/729;
  constexpr double a61 = 9017.0/3168, a62 = -355.0/33, a63 = 46732.0/5247, a64 = 49.0/176,
                   a65 = -5103.0/18656;
  constexpr double b1 = 35.0/384, b3 = 500.0/1113, b4 = 125.0/192, b5 = -2187.0/6784,
                   b6 = 11.0/84;
  constexpr double e1 = 71.0/57600, e3 = -71.0/16695, e4 = 71.0/1920, e5 = -17253.0/339200,
                   e6 = 22.0/525, e7 = -1.0/40;
  // clang-format on

  const double t_lo = std::nextafter(a, b);
  const double t_hi = std::nextafter(b, a);
  auto rhs = [&](double t, const State& state, State& out) {
    gen.apply_at(std::clamp(t, t_lo, t_hi), state, out);
  };

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, yerr = y;
  rhs(a, y, k1);

  // Initial step size from the scale of y and f.
  double h;
  {
    const double d0 = std::sqrt(y.array().abs().square().sum());
    const double d1 = std::sqrt(k1.array().abs().square().sum());
    h = (d1 > 1e-12 * std::max(d0, 1.0)) ? 0.01 * std::max(d0, 1.0) / d1 : (b - a) / 100.0;
    h = std::min({h, b - a, settings.max_step});
  }

  double t = a;
  long steps = 0;
  while (t < b) {
    if (++steps > 20'000'000) {
      std::ostringstream msg;
      msg << "integration stalled near t = " << t;
      throw NumericalError(msg.str());
    }
    h = std::min({h, b - t, settings.max_step});
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
      std::ostringstream msg;
      msg << "step size underflow at t = " << t;
      throw NumericalError(msg.str());
    }
    ytmp = y + h * (a21 * k1);
    rhs(t + c2 * h, ytmp, k2);
    ytmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, ytmp, k3);
    ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, ytmp, k4);
    ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, ytmp, k5);
    ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, ytmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = error_norm(yerr, y, ynew, settings.rtol, settings.atol);
    if (!std::isfinite(err)) err = 10.0;  // force rejection and shrink

    if (err <= 1.0) {
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL: k7 = f(t_new, y_new)
      const double grow = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      // rejected: y and k1 = f(t, y) are unchanged
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
}

template <class State>
State integrate_generator(const TimeDependentGenerator& gen, State y,
                          const PropagationSettings& settings) {
  const double t1 = settings.horizon();
  std::vector<double> edges = gen.breakpoints_within(settings.t0, t1);
  edges.insert(edges.begin(), settings.t0);
  edges.push_back(t1);
  for (std::size_t s = 0; s + 1 < edges.size(); ++s)
    integrate_segment(gen, y, edges[s], edges[s + 1], settings);  // degenerate spans are skipped
  return y;
}

}  // namespace detail

/// Solves d rho / dt = L(t) rho from t0 to t1 and returns rho(t1). The state
/// need not be Hermitian; complex virtual efficiencies evolve non-Hermitian
/// generating states.
inline Matrix propagate(const TimeDependentGenerator& gen, const Matrix& state,
                        const PropagationSettings& settings) {
  const int d = gen.space().total_dim();
  require(state.rows() == d && state.cols() == d, "propagate: state dimension mismatch");
  Vector y = vectorize(state);
  y = detail::integrate_generator(gen, std::move(y), settings);
  return unvectorize(y, d);
}

/// Propagates the identity superoperator column by column (as one matrix
/// ODE), returning the full propagator matrix over [t0, t1].
inline Matrix propagate_map(const TimeDependentGenerator& gen,
                            const PropagationSettings& settings) {
  const Eigen::Index d2 =
      static_cast<Eigen::Index>(gen.space().total_dim()) * gen.space().total_dim();
  Matrix y = Matrix::Identity(d2, d2);
  return detail::integrate_generator(gen, std::move(y), settings);
}

}  // namespace zpgsim

#endif  // ZPGSIM_INTEGRATE_HPP
