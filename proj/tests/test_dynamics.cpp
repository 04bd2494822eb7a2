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

#include <catch2/catch_amalgamated.hpp>

#include "test_helpers.hpp"
#include "zpgsim/batch.hpp"
#include "zpgsim/oracle.hpp"

using namespace zpgsim;

namespace {

PropagationSettings tight(double t0, double t1) {
  PropagationSettings s;
  s.t0 = t0;
  s.t1 = t1;
  s.rtol = 1e-11;
  s.atol = 1e-13;
  return s;
}

}  // namespace

TEST_CASE("square pulse envelopes", "[dynamics]") {
  SECTION("area over width") {
    const PulseShape p = square_pulse(kPi, 1.0);
    CHECK(p.envelope(0.5) == Catch::Approx(kPi));
    CHECK(p.envelope(1.5) == 0.0);
    const PulseShape fig2 = square_pulse(10.0 * kPi, 2.0);
    CHECK(fig2.envelope(1.0) == Catch::Approx(5.0 * kPi));
    const PulseShape zero = square_pulse(0.0, 1.0);
    CHECK(zero.envelope(0.5) == 0.0);
  }
  SECTION("quadrature of the envelope reproduces the area") {
    const PulseShape p = square_pulse(3.7, 1.3, 0.2);
    // Midpoint rule on the open support is exact for a constant envelope.
    const int n = 1000;
    const double h = p.tau / n;
    double area = 0.0;
    for (int i = 0; i < n; ++i) area += h * p.envelope(p.t_start + (i + 0.5) * h);
    CHECK(std::abs(area - 3.7) < 1e-10);
  }
  SECTION("non-positive width rejected") {
    CHECK_THROWS_AS(square_pulse(kPi, 0.0), std::invalid_argument);
  }
}

TEST_CASE("propagate reproduces closed-form decay", "[dynamics]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  SECTION("eta = 1 halves the trace after one half-life") {
    const auto zpg = build_zpg(net, VirtualDetectorConfig::from_efficiencies({Complex(1.0)}));
    const Matrix out = propagate(zpg, net.joint_initial_state(), tight(0.0, std::log(2.0)));
    CHECK(std::abs(out.trace().real() - 0.5) < 1e-10);
  }
  SECTION("eta = 0 preserves the trace") {
    const auto gen = net.total_lindbladian();
    for (double t : {0.3, 1.0, 4.0}) {
      const Matrix out = propagate(gen, net.joint_initial_state(), tight(0.0, t));
      CHECK(std::abs(out.trace().real() - 1.0) < 1e-9);
    }
  }
  SECTION("zero generator leaves the state unchanged") {
    const HilbertSpace qubit({2});
    TimeDependentGenerator zero(Superoperator::zero(qubit));
    std::mt19937_64 rng(3);
    const Matrix rho = zpgsim_test::random_density(2, rng);
    CHECK(max_abs(propagate(zero, rho, tight(0.0, 2.0)) - rho) < 1e-13);
  }
}

TEST_CASE("semigroup consistency for constant generators", "[dynamics]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter(0.8));
  const auto zpg =
      build_zpg(net, VirtualDetectorConfig::from_efficiencies({Complex(0.6, 0.3)}));
  const Matrix mid = propagate(zpg, net.joint_initial_state(), tight(0.0, 0.9));
  const Matrix two_leg = propagate(zpg, mid, tight(0.9, 2.1));
  const Matrix one_leg = propagate(zpg, net.joint_initial_state(), tight(0.0, 2.1));
  CHECK(max_abs(two_leg - one_leg) < 2e-10);
}

TEST_CASE("batched generating solutions", "[dynamics]") {
  SourceSpec src = zpgsim_test::excited_emitter();
  EmitterNetwork net = EmitterNetwork::single(src);
  PropagationSettings settings = tight(0.0, 2.0);

  SECTION("trivial grid returns the unit trace") {
    const GeneratingTable table = batch_generating_solutions(net, fourier_grid({1}), settings);
    REQUIRE(table.traces.size() == 1);
    CHECK(std::abs(table.traces[0] - Complex(1.0)) < 1e-9);
  }

  SECTION("N = 2 grid matches the closed decay form at eta in {0, 2}") {
    const GeneratingTable table = batch_generating_solutions(net, fourier_grid({2}), settings);
    const double t = 2.0;
    CHECK(std::abs(table.traces[0] - Complex(1.0)) < 1e-9);
    CHECK(std::abs(table.traces[1] - Complex(2.0 * std::exp(-t) - 1.0)) < 1e-9);
  }

  SECTION("maps reproduce states when applied to the initial state") {
    BatchOptions opts;
    opts.want_states = true;
    opts.want_maps = true;
    const GeneratingTable table =
        batch_generating_solutions(net, fourier_grid({3}), settings, opts);
    for (int k = 0; k < table.grid.size(); ++k) {
      const Matrix from_map =
          unvectorize(table.final_maps[static_cast<std::size_t>(k)] * vectorize(table.initial_state), 2);
      CHECK(max_abs(from_map - table.final_states[static_cast<std::size_t>(k)]) < 1e-10);
    }
  }

  SECTION("worker count does not change results") {
    SourceSpec driven = zpgsim_test::pulsed_emitter(2.0 * kPi, 0.8);
    EmitterNetwork net2({driven, driven}, haar_unitary(2, 5));
    PropagationSettings s = tight(0.0, 6.0);
    BatchOptions one, four;
    one.workers = 1;
    four.workers = 4;
    const GeneratingTable a = batch_generating_solutions(net2, fourier_grid({3, 3}), s, one);
    const GeneratingTable b = batch_generating_solutions(net2, fourier_grid({3, 3}), s, four);
    for (std::size_t k = 0; k < a.traces.size(); ++k) {
      CHECK(a.traces[k].real() == b.traces[k].real());
      CHECK(a.traces[k].imag() == b.traces[k].imag());
    }
  }

  SECTION("conjugate-pair shortcut agrees with direct solves") {
    SourceSpec driven = zpgsim_test::pulsed_emitter(3.0 * kPi, 1.1);
    EmitterNetwork net2({driven, driven}, haar_unitary(2, 8));
    PropagationSettings s = tight(0.0, 8.0);
    BatchOptions direct, shortcut;
    direct.conjugate_pair_shortcut = false;
    direct.want_states = true;
    direct.want_maps = true;
    shortcut.conjugate_pair_shortcut = true;
    shortcut.want_states = true;
    shortcut.want_maps = true;
    const GeneratingTable a = batch_generating_solutions(net2, fourier_grid({4, 2}), s, direct);
    const GeneratingTable b = batch_generating_solutions(net2, fourier_grid({4, 2}), s, shortcut);
    for (std::size_t k = 0; k < a.traces.size(); ++k) {
      CHECK(std::abs(a.traces[k] - b.traces[k]) < 1e-9);
      CHECK(max_abs(a.final_states[k] - b.final_states[k]) < 1e-9);
      CHECK(max_abs(a.final_maps[k] - b.final_maps[k]) < 1e-9);
    }
  }
}

TEST_CASE("conjugation symmetry of generating traces", "[dynamics]") {
  SourceSpec src = zpgsim_test::pulsed_emitter(2.0 * kPi, 1.0);
  EmitterNetwork net = EmitterNetwork::single(src);
  BatchOptions direct;
  direct.conjugate_pair_shortcut = false;
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({5}), tight(0.0, 10.0), direct);
  for (int k = 0; k < table.grid.size(); ++k) {
    const int partner = table.grid.conjugate_partner(k);
    CHECK(std::abs(table.traces[static_cast<std::size_t>(k)] -
                   std::conj(table.traces[static_cast<std::size_t>(partner)])) < 1e-10);
  }
}

TEST_CASE("integration horizon convergence", "[dynamics]") {
  // Residual emission falls off as exp(-gamma * horizon): pushing the
  // horizon from +25 to +35 lifetimes moves every trace by less than 1e-9,
  // while +10 to +20 still moves them at the 1e-4 scale for a bright pulse.
  SourceSpec src = zpgsim_test::pulsed_emitter(10.0 * kPi, 2.0);
  EmitterNetwork net = EmitterNetwork::single(src);
  const VirtualGrid grid = fourier_grid({3});

  auto traces_at = [&](double horizon) {
    return batch_generating_solutions(net, grid, tight(0.0, 2.0 + horizon)).traces;
  };
  const auto t10 = traces_at(10.0), t20 = traces_at(20.0);
  const auto t25 = traces_at(25.0), t35 = traces_at(35.0);
  for (std::size_t k = 0; k < t10.size(); ++k) {
    CHECK(std::abs(t10[k] - t20[k]) < 1e-4);
    CHECK(std::abs(t25[k] - t35[k]) < 1e-9);
  }
}

TEST_CASE("integration failures carry the failure time", "[dynamics]") {
  PropagationSettings s;
  s.t0 = 0.0;
  s.t1 = -1.0;
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  CHECK_THROWS_AS(propagate(net.total_lindbladian(), net.joint_initial_state(), s),
                  std::invalid_argument);
}
