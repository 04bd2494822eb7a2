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

#ifndef ZPGSIM_GENERATOR_HPP
#define ZPGSIM_GENERATOR_HPP

#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zpgsim/superoperator.hpp"
#include "zpgsim/types.hpp"

namespace zpgsim {

/// Exact textual key for a double (hexfloat), safe for merge decisions.
inline std::string key_double(double v) {
  std::ostringstream out;
  out << std::hexfloat << v;
  return out.str();
}

/// Real scalar coefficient of a driven generator term.
///
/// `breakpoints` lists times where the coefficient is discontinuous; the
/// integrator places step boundaries exactly there. Coefficients with equal
/// `merge_key` are known to be the same function, which lets generator
/// assembly share one superoperator among identically driven sources.
struct DriveCoefficient {
  std::function<double(double)> value;
  std::vector<double> breakpoints;
  std::optional<std::string> merge_key;

  static DriveCoefficient constant(double c) {
    DriveCoefficient out;
    out.value = [c](double) { return c; };
    out.merge_key = "const:" + key_double(c);
    return out;
  }

  DriveCoefficient scaled(double factor) const {
    DriveCoefficient out;
    auto base = value;
    out.value = [base, factor](double t) { return factor * base(t); };
    out.breakpoints = breakpoints;
    if (merge_key) out.merge_key = *merge_key + "*" + key_double(factor);
    return out;
  }
};

/// Time-dependent generator  A(t) = A_const + sum_k coeff_k(t) A_k  acting on
/// column-vectorized density matrices.
class TimeDependentGenerator {
 public:
  explicit TimeDependentGenerator(
      Superoperator constant_part,
      std::vector<std::pair<Superoperator, DriveCoefficient>> driven = {})
      : space_(constant_part.space()),
        constant_(std::move(constant_part)),
        driven_(std::move(driven)) {
    for (const auto& [part, coeff] : driven_) {
      require(part.space() == space_, "TimeDependentGenerator: driven part on wrong space");
      require(static_cast<bool>(coeff.value), "TimeDependentGenerator: empty coefficient");
      breakpoints_.insert(breakpoints_.end(), coeff.breakpoints.begin(),
                          coeff.breakpoints.end());
    }
    std::sort(breakpoints_.begin(), breakpoints_.end());
    breakpoints_.erase(std::unique(breakpoints_.begin(), breakpoints_.end()),
                       breakpoints_.end());
  }

  const HilbertSpace& space() const { return space_; }
  const Superoperator& constant_part() const { return constant_; }
  const std::vector<std::pair<Superoperator, DriveCoefficient>>& driven_parts() const {
    return driven_;
  }
  bool time_dependent() const { return !driven_.empty(); }

  /// Full matrix of the generator at time t.
  Matrix action_at(double t) const {
    Matrix a = constant_.action();
    for (const auto& [part, coeff] : driven_) a += coeff.value(t) * part.action();
    return a;
  }

  /// out = A(t) * state, without forming A(t). State columns are independent
  /// vectorized density matrices (one column for state propagation, d^2
  /// columns when propagating a full map).
  template <class EigenType>
  void apply_at(double t, const EigenType& state, EigenType& out) const {
    out.noalias() = constant_.action() * state;
    for (const auto& [part, coeff] : driven_) {
      const double c = coeff.value(t);
      if (c != 0.0) out.noalias() += c * (part.action() * state);
    }
  }

  /// Breakpoints strictly inside (t0, t1), sorted.
  std::vector<double> breakpoints_within(double t0, double t1) const {
    std::vector<double> out;
    for (double b : breakpoints_)
      if (b > t0 && b < t1) out.push_back(b);
    return out;
  }

  /// Generator with a constant superoperator subtracted (used to turn a
  /// Lindbladian into a zero-photon generator).
  TimeDependentGenerator minus_constant(const Superoperator& term) const {
    return TimeDependentGenerator(constant_ - term, driven_);
  }

 private:
  HilbertSpace space_;
  Superoperator constant_;
  std::vector<std::pair<Superoperator, DriveCoefficient>> driven_;
  std::vector<double> breakpoints_;
};

}  // namespace zpgsim

#endif  // ZPGSIM_GENERATOR_HPP
