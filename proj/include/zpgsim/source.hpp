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

#ifndef ZPGSIM_SOURCE_HPP
#define ZPGSIM_SOURCE_HPP

#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "zpgsim/pulse.hpp"
#include "zpgsim/types.hpp"

namespace zpgsim {

/// Two-level operator catalog. Basis order: index 0 = ground, 1 = excited.
namespace two_level {
inline Matrix lowering() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 1) = 1.0;  // |g><e|
  return s;
}
inline Matrix raising() { return lowering().adjoint(); }
inline Matrix number() {
  Matrix n = Matrix::Zero(2, 2);
  n(1, 1) = 1.0;
  return n;
}
inline Matrix pauli_x() { return lowering() + raising(); }
inline Matrix pauli_y() { return Complex(0, 1) * (lowering() - raising()); }
/// sigma_z = |e><e| - |g><g|.
inline Matrix pauli_z() {
  Matrix z = Matrix::Zero(2, 2);
  z(0, 0) = -1.0;
  z(1, 1) = 1.0;
  return z;
}
inline Matrix ground_state() {
  Matrix rho = Matrix::Zero(2, 2);
  rho(0, 0) = 1.0;
  return rho;
}
inline Matrix excited_state() {
  Matrix rho = Matrix::Zero(2, 2);
  rho(1, 1) = 1.0;
  return rho;
}
}  // namespace two_level

struct HamiltonianTerm {
  Matrix op;
  DriveCoefficient coeff;
};

struct DissipationChannel {
  Matrix op;
  double rate;
};

/// One emitter: local dynamics, collection operator and rate, initial state.
/// collection_rate = 0 marks a vacuum input whose local dynamics is ignored.
struct SourceSpec {
  int dim = 2;
  std::vector<HamiltonianTerm> hamiltonian_terms;
  std::vector<DissipationChannel> dissipation_channels;
  Matrix collection_op;
  double collection_rate = 1.0;
  Matrix initial_state;

  bool is_vacuum() const { return collection_rate == 0.0; }

  static SourceSpec vacuum() {
    SourceSpec s;
    s.dim = 1;
    s.collection_op = Matrix::Zero(1, 1);
    s.collection_rate = 0.0;
    s.initial_state = Matrix::Identity(1, 1);
    return s;
  }
};

inline void validate_source(const SourceSpec& s) {
  require(s.dim >= 1, "SourceSpec: dim must be >= 1");
  require(s.collection_rate >= 0.0, "SourceSpec: collection rate must be >= 0");
  require(s.collection_op.rows() == s.dim && s.collection_op.cols() == s.dim,
          "SourceSpec: collection operator dimension mismatch");
  require(s.initial_state.rows() == s.dim && s.initial_state.cols() == s.dim,
          "SourceSpec: initial state dimension mismatch");
  require(is_hermitian(s.initial_state, 1e-10), "SourceSpec: initial state is not Hermitian");
  require(std::abs(s.initial_state.trace() - Complex(1.0)) <= 1e-10,
          "SourceSpec: initial state trace must be 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.initial_state);
  require(es.eigenvalues().minCoeff() >= -1e-10,
          "SourceSpec: initial state is not positive semidefinite");
  for (const auto& term : s.hamiltonian_terms)
    require(term.op.rows() == s.dim && term.op.cols() == s.dim,
            "SourceSpec: Hamiltonian term dimension mismatch");
  for (const auto& chan : s.dissipation_channels) {
    require(chan.op.rows() == s.dim && chan.op.cols() == s.dim,
            "SourceSpec: dissipation channel dimension mismatch");
    require(chan.rate >= 0.0, "SourceSpec: dissipation rate must be >= 0");
  }
}

struct TwoLevelParams {
  double gamma = 1.0;
  std::optional<PulseShape> pulse;
  double detuning = 0.0;
  bool start_excited = false;
};

/// Two-level emitter in the frame rotating at a common reference frequency.
///
/// `detuning` offsets the emitter transition from that frame; the drive (if
/// any) is taken resonant with the emitter itself, so a detuned emitter is
/// still inverted by a pi pulse but radiates with an extra exp(i*detuning*t)
/// phase, which is what makes its photons distinguishable from an undetuned
/// twin's.
inline SourceSpec two_level_source(const TwoLevelParams& p) {
  SourceSpec s;
  s.dim = 2;
  s.collection_op = two_level::lowering();
  s.collection_rate = p.gamma;
  s.initial_state = p.start_excited ? two_level::excited_state() : two_level::ground_state();
  if (p.detuning != 0.0) {
    s.hamiltonian_terms.push_back(
        {two_level::number(), DriveCoefficient::constant(p.detuning)});
  }
  if (p.pulse) {
    if (p.detuning == 0.0) {
      s.hamiltonian_terms.push_back({two_level::pauli_x(), p.pulse->drive_coefficient(0.5)});
    } else {
      // Drive resonant with the shifted transition: quadratures rotate at
      // the detuning frequency relative to the reference frame.
      const double delta = p.detuning;
      auto cos_coeff = p.pulse->drive_coefficient(0.5);
      auto sin_coeff = p.pulse->drive_coefficient(0.5);
      auto base_cos = cos_coeff.value;
      auto base_sin = sin_coeff.value;
      cos_coeff.value = [base_cos, delta](double t) { return base_cos(t) * std::cos(delta * t); };
      sin_coeff.value = [base_sin, delta](double t) { return base_sin(t) * std::sin(delta * t); };
      if (cos_coeff.merge_key) *cos_coeff.merge_key += ":cos:" + key_double(delta);
      if (sin_coeff.merge_key) *sin_coeff.merge_key += ":sin:" + key_double(delta);
      s.hamiltonian_terms.push_back({two_level::pauli_x(), cos_coeff});
      s.hamiltonian_terms.push_back({two_level::pauli_y(), sin_coeff});
    }
  }
  return s;
}

}  // namespace zpgsim

#endif  // ZPGSIM_SOURCE_HPP
