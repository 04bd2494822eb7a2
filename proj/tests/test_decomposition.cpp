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
#include "zpgsim/decompose.hpp"
#include "zpgsim/figures.hpp"
#include "zpgsim/oracle.hpp"

using namespace zpgsim;

namespace {

PropagationSettings settings_until(double t1, double rtol = 1e-11) {
  PropagationSettings s;
  s.t0 = 0.0;
  s.t1 = t1;
  s.rtol = rtol;
  s.atol = rtol * 1e-2;
  return s;
}

GeneratingTable synthetic_table(const std::vector<int>& truncations,
                                const std::map<std::vector<int>, Complex>& coefficients) {
  const VirtualGrid grid = fourier_grid(truncations);
  GeneratingTable table{grid, {}, {}, {}, Matrix::Identity(1, 1), 0.0, 1.0};
  table.traces.resize(static_cast<std::size_t>(grid.size()));
  for (int k = 0; k < grid.size(); ++k) {
    Complex acc = 0.0;
    for (const auto& [n, c] : coefficients) {
      Complex z_pow = 1.0;
      for (std::size_t j = 0; j < n.size(); ++j)
        z_pow *= std::pow(grid.config(k).z_inverse(static_cast<int>(j)),
                          static_cast<double>(n[j]));
      acc += c * z_pow;
    }
    table.traces[static_cast<std::size_t>(k)] = acc;
  }
  return table;
}

}  // namespace

TEST_CASE("inverse transform of a known polynomial", "[decomposition]") {
  const auto table = synthetic_table({4}, {{{0}, 0.5}, {{1}, 0.5}});
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(dist.prob({0}) == Catch::Approx(0.5).margin(1e-14));
  CHECK(dist.prob({1}) == Catch::Approx(0.5).margin(1e-14));
  CHECK(std::abs(dist.prob({2})) < 1e-14);
  CHECK(std::abs(dist.prob({3})) < 1e-14);
  CHECK(dist.residue < 1e-14);
}

TEST_CASE("non-fourier tables are rejected", "[decomposition]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  const GeneratingTable corners =
      batch_generating_solutions(net, threshold_corner_grid(1), settings_until(3.0));
  CHECK_THROWS_AS(invert_distribution(corners), std::invalid_argument);
  CHECK_THROWS_AS(threshold_distribution(batch_generating_solutions(
                      net, fourier_grid({2}), settings_until(3.0))),
                  std::invalid_argument);
}

TEST_CASE("complete decay emits exactly one photon", "[decomposition]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({4}), settings_until(40.0));
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(std::abs(dist.prob({1}) - 1.0) < 1e-8);
  CHECK(std::abs(dist.prob({0})) < 1e-8);
  CHECK(std::abs(dist.prob({2})) < 1e-8);
  CHECK(dist.sum() == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("conditional states of interrupted decay", "[decomposition]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  BatchOptions opts;
  opts.want_states = true;
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({2}), settings_until(std::log(2.0)), opts);
  const ConditionalStateSet set = invert_states(table);
  CHECK(max_abs(set.state({0}) - 0.5 * two_level::excited_state()) < 1e-9);
  CHECK(max_abs(set.state({1}) - 0.5 * two_level::ground_state()) < 1e-9);

  SECTION("traces match the inverted distribution") {
    const PhotonNumberDistribution dist = invert_distribution(table);
    for (int flat = 0; flat < dist.size(); ++flat)
      CHECK(std::abs(set.states[static_cast<std::size_t>(flat)].trace().real() - dist[flat]) <
            1e-9);
  }
  SECTION("conditional states sum to the unconditioned evolution") {
    const Matrix unconditioned =
        propagate(net.total_lindbladian(), net.joint_initial_state(),
                  settings_until(std::log(2.0)));
    Matrix total = Matrix::Zero(2, 2);
    for (const Matrix& rho : set.states) total += rho;
    CHECK(max_abs(total - unconditioned) < 1e-8);
  }
  SECTION("degenerate grid returns the unconditioned state") {
    BatchOptions o;
    o.want_states = true;
    const GeneratingTable t1 =
        batch_generating_solutions(net, fourier_grid({1}), settings_until(std::log(2.0)), o);
    const ConditionalStateSet single = invert_states(t1);
    const Matrix unconditioned = propagate(net.total_lindbladian(), net.joint_initial_state(),
                                           settings_until(std::log(2.0)));
    CHECK(max_abs(single.state({0}) - unconditioned) < 1e-9);
  }
}

TEST_CASE("conditional states are near-positive with matching traces", "[decomposition]") {
  SourceSpec src = zpgsim_test::pulsed_emitter(3.0 * kPi, 1.5);
  EmitterNetwork net = EmitterNetwork::single(src);
  BatchOptions opts;
  opts.want_states = true;
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({8}), settings_until(17.0), opts);
  const ConditionalStateSet set = invert_states(table);
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(set.hermiticity_residue < 1e-8);
  for (int flat = 0; flat < dist.size(); ++flat) {
    if (dist[flat] <= 1e-6) continue;
    const Matrix normalized = set.states[static_cast<std::size_t>(flat)] / dist[flat];
    CHECK(max_abs(normalized - normalized.adjoint()) < 1e-8);
    Eigen::SelfAdjointEigenSolver<Matrix> es(normalized);
    CHECK(es.eigenvalues().minCoeff() > -1e-7);
  }
}

TEST_CASE("conditional maps invert alongside states", "[decomposition]") {
  SourceSpec src = zpgsim_test::pulsed_emitter(kPi, 0.4);
  EmitterNetwork net = EmitterNetwork::single(src);
  BatchOptions opts;
  opts.want_maps = true;
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({3}), settings_until(8.0), opts);
  const ConditionalStateSet set = invert_states(table);
  REQUIRE(set.maps.size() == 3);
  // Conditional propagators applied to the initial state reproduce rho^(n).
  for (std::size_t k = 0; k < set.maps.size(); ++k) {
    const Matrix rho = unvectorize(set.maps[k] * vectorize(table.initial_state), 2);
    CHECK(max_abs(((rho + rho.adjoint()) / 2.0).eval() - set.states[k]) < 1e-9);
  }
}

TEST_CASE("negative roundoff is clamped into the residue", "[decomposition]") {
  const auto table = synthetic_table({2}, {{{0}, 1.0 + 5e-10}, {{1}, -5e-10}});
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(dist.prob({1}) == 0.0);
  CHECK(dist.residue >= 5e-10);
  CHECK_FALSE(dist.aliasing_failure);
}

TEST_CASE("badly truncated grids are flagged", "[decomposition]") {
  // A distribution with strong weight beyond the truncation leaves a large
  // aliasing footprint.
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::pulsed_emitter(10.0 * kPi, 2.0));
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({2}), settings_until(17.0));
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(dist.tail_mass > 0.1);
}

TEST_CASE("inconsistent traces trip the aliasing-failure flag", "[decomposition]") {
  // Imaginary weight this large cannot come from a physical model; the
  // inversion must keep the data but raise the flag.
  auto table = synthetic_table({4}, {{{0}, Complex(0.7, 2e-3)}, {{1}, Complex(0.3, -1e-3)}});
  const PhotonNumberDistribution dist = invert_distribution(table);
  CHECK(dist.residue > 1e-4);
  CHECK(dist.aliasing_failure);
}

TEST_CASE("joint conditional states across two detectors", "[decomposition]") {
  EmitterNetwork net({zpgsim_test::excited_emitter(), zpgsim_test::excited_emitter()},
                     Matrix::Identity(2, 2));
  BatchOptions opts;
  opts.want_states = true;
  const GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({2, 2}), settings_until(40.0), opts);
  const ConditionalStateSet set = invert_states(table);
  const Matrix ground_pair = kron(two_level::ground_state(), two_level::ground_state());
  CHECK(max_abs(set.state({1, 1}) - ground_pair) < 1e-8);
  CHECK(std::abs(set.state({0, 0}).trace()) < 1e-8);
  CHECK(std::abs(set.state({1, 0}).trace()) < 1e-8);
  CHECK(std::abs(set.state({0, 1}).trace()) < 1e-8);
}

TEST_CASE("states can be recovered from maps alone", "[decomposition]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
  BatchOptions opts;
  opts.want_maps = true;
  GeneratingTable table =
      batch_generating_solutions(net, fourier_grid({2}), settings_until(std::log(2.0)), opts);
  table.final_states.clear();  // keep only the maps
  const ConditionalStateSet set = invert_states(table);
  REQUIRE(set.states.size() == 2);
  CHECK(max_abs(set.state({0}) - 0.5 * two_level::excited_state()) < 1e-9);
  CHECK(max_abs(set.state({1}) - 0.5 * two_level::ground_state()) < 1e-9);
}

TEST_CASE("threshold distribution from corner tables", "[decomposition]") {
  SECTION("single detector complement") {
    EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
    const double t = 1.3;
    const GeneratingTable corners =
        batch_generating_solutions(net, threshold_corner_grid(1), settings_until(t));
    const ThresholdDistribution dist = threshold_distribution(corners);
    const double p0 = zero_photon_probability(net, 1.0, settings_until(t));
    CHECK(std::abs(dist.prob({1}) - (1.0 - p0)) < 1e-10);
    CHECK(std::abs(dist.sum() - 1.0) < 1e-10);
    CHECK(dist.brightness() == Catch::Approx(dist.prob({1})));
  }
  SECTION("independent identical sources factorize") {
    SourceSpec src = zpgsim_test::pulsed_emitter(1.8 * kPi, 0.9);
    EmitterNetwork joint({src, src}, Matrix::Identity(2, 2));
    EmitterNetwork single = EmitterNetwork::single(src);
    const ThresholdDistribution two = threshold_distribution(
        batch_generating_solutions(joint, threshold_corner_grid(2), settings_until(12.0)));
    const ThresholdDistribution one = threshold_distribution(
        batch_generating_solutions(single, threshold_corner_grid(1), settings_until(12.0)));
    for (int m1 : {0, 1})
      for (int m2 : {0, 1})
        CHECK(std::abs(two.prob({m1, m2}) - one.prob({m1}) * one.prob({m2})) < 1e-8);
  }
}

TEST_CASE("threshold and number statistics agree", "[decomposition]") {
  SourceSpec a = zpgsim_test::pulsed_emitter(1.4 * kPi, 0.8);
  SourceSpec b = zpgsim_test::pulsed_emitter(0.9 * kPi, 1.2, 1.4);
  EmitterNetwork net({a, b}, haar_unitary(2, 21));
  const double t1 = 14.0;
  const ThresholdDistribution beta = threshold_distribution(
      batch_generating_solutions(net, threshold_corner_grid(2), settings_until(t1)));
  const PhotonNumberDistribution pn = invert_distribution(
      batch_generating_solutions(net, fourier_grid({8, 8}), settings_until(t1)));

  double by_clicks[2][2] = {{0, 0}, {0, 0}};
  for (int flat = 0; flat < pn.size(); ++flat) {
    const auto n = pn.count_vector(flat);
    by_clicks[n[0] > 0 ? 1 : 0][n[1] > 0 ? 1 : 0] += pn[flat];
  }
  for (int m1 : {0, 1})
    for (int m2 : {0, 1})
      CHECK(std::abs(beta.prob({m1, m2}) - by_clicks[m1][m2]) < 1e-7);
  CHECK(std::abs(beta.sum() - 1.0) < 1e-8);
}

TEST_CASE("loss relation links direct solves to the distribution", "[decomposition]") {
  SourceSpec src = zpgsim_test::pulsed_emitter(4.0 * kPi, 1.0);
  EmitterNetwork net = EmitterNetwork::single(src);
  const double t1 = 14.0;
  const PhotonNumberDistribution dist = invert_distribution(
      batch_generating_solutions(net, fourier_grid({12}), settings_until(t1)));
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const double eta = zpgsim_test::uniform(rng);
    const double direct = zero_photon_probability(net, eta, settings_until(t1));
    double from_dist = 0.0;
    for (int n = 0; n < 12; ++n) from_dist += std::pow(1.0 - eta, n) * dist.prob({n});
    CHECK(std::abs(direct - from_dist) < 1e-8);
  }
}

TEST_CASE("identity circuits factorize the joint distribution", "[decomposition]") {
  SourceSpec a = zpgsim_test::pulsed_emitter(1.2 * kPi, 0.6);
  SourceSpec b = zpgsim_test::pulsed_emitter(2.3 * kPi, 1.1);
  EmitterNetwork joint({a, b}, Matrix::Identity(2, 2));
  const double t1 = 14.0;
  const PhotonNumberDistribution pab = invert_distribution(
      batch_generating_solutions(joint, fourier_grid({6, 6}), settings_until(t1)));
  const PhotonNumberDistribution pa = invert_distribution(batch_generating_solutions(
      EmitterNetwork::single(a), fourier_grid({6}), settings_until(t1)));
  const PhotonNumberDistribution pb = invert_distribution(batch_generating_solutions(
      EmitterNetwork::single(b), fourier_grid({6}), settings_until(t1)));
  for (int n1 = 0; n1 < 6; ++n1)
    for (int n2 = 0; n2 < 6; ++n2)
      CHECK(std::abs(pab.prob({n1, n2}) - pa.prob({n1}) * pb.prob({n2})) < 1e-8);
}

TEST_CASE("doubling truncations shrinks the aliasing tail", "[decomposition]") {
  SourceSpec src = zpgsim_test::pulsed_emitter(10.0 * kPi, 2.0);
  EmitterNetwork net = EmitterNetwork::single(src);
  const double t1 = 17.0;
  const PhotonNumberDistribution coarse = invert_distribution(
      batch_generating_solutions(net, fourier_grid({6}), settings_until(t1)));
  const PhotonNumberDistribution fine = invert_distribution(
      batch_generating_solutions(net, fourier_grid({12}), settings_until(t1)));
  CHECK(fine.tail_mass <= coarse.tail_mass);
  for (int n = 0; n < 6; ++n)
    CHECK(std::abs(fine.prob({n}) - coarse.prob({n})) < coarse.tail_mass + 1e-10);
}

TEST_CASE("auto truncation doubles until the tail is negligible", "[decomposition]") {
  EmitterNetwork net = EmitterNetwork::single(zpgsim_test::pulsed_emitter(2.0 * kPi, 0.5));
  AutoTruncationOptions opts;
  opts.initial_truncations = {2};
  opts.tail_tolerance = 1e-9;
  const PhotonNumberDistribution dist =
      auto_truncated_distribution(net, settings_until(10.0), opts);
  CHECK(dist.tail_mass < 1e-9);
  CHECK(dist.truncations()[0] > 2);
}

TEST_CASE("figures of merit on exactly solvable sources", "[decomposition]") {
  EmitterNetwork decay = EmitterNetwork::single(zpgsim_test::excited_emitter());
  const PropagationSettings s = settings_until(35.0, 1e-12);
  SECTION("mean photon number of a full decay") {
    const FomEstimate mu = mean_photon_number(decay, 1.0, s);
    CHECK(std::abs(mu.value - 1.0) < 1e-6);
    const FomEstimate mu04 = mean_photon_number(decay, 0.4, s);
    CHECK(std::abs(mu04.value - 0.4) < 1e-6);
  }
  SECTION("ideal single photon has vanishing g2") {
    const FomEstimate g = g2(decay, s);
    CHECK(std::abs(g.value) < 1e-6);
  }
  SECTION("vacuum source has undefined g2") {
    EmitterNetwork vac = EmitterNetwork::single(SourceSpec::vacuum());
    PropagationSettings sv = s;
    sv.t1 = 1.0;  // no collected emission; horizon must be explicit
    CHECK_THROWS_AS(g2(vac, sv), NumericalError);
  }
}

TEST_CASE("parity from the z = -1 trace", "[decomposition]") {
  const PropagationSettings s = settings_until(40.0, 1e-12);
  SECTION("one emitted photon gives odd parity") {
    EmitterNetwork net = EmitterNetwork::single(zpgsim_test::excited_emitter());
    CHECK(std::abs(parity(net, s) - (-1.0)) < 1e-8);
  }
  SECTION("undriven ground state gives even parity") {
    TwoLevelParams p;
    EmitterNetwork net = EmitterNetwork::single(two_level_source(p));
    CHECK(std::abs(parity(net, s) - 1.0) < 1e-10);
  }
  SECTION("parity matches the alternating distribution sum") {
    EmitterNetwork net = EmitterNetwork::single(zpgsim_test::pulsed_emitter(10.0 * kPi, 2.0));
    const PropagationSettings sf = settings_until(17.0, 1e-12);
    const PhotonNumberDistribution dist = invert_distribution(
        batch_generating_solutions(net, fourier_grid({14}), sf));
    double alternating = 0.0;
    for (int n = 0; n < 14; ++n) alternating += ((n % 2 == 0) ? 1.0 : -1.0) * dist.prob({n});
    CHECK(std::abs(parity(net, sf) - alternating) < 1e-8);
  }
}

TEST_CASE("hom coincidences", "[decomposition]") {
  const PropagationSettings s = settings_until(16.0);
  SourceSpec src = zpgsim_test::pulsed_emitter(kPi, 0.05);
  SECTION("vacuum twin never produces a coincidence") {
    // Needs a source with at most one photon: the undriven excited emitter.
    const double beta11 = hom_coincidence(zpgsim_test::excited_emitter(), SourceSpec::vacuum(), s);
    CHECK(std::abs(beta11) < 1e-9);
  }
  SECTION("strongly detuned twin is distinguishable") {
    SourceSpec twin = zpgsim_test::pulsed_emitter(kPi, 0.05, 1.0, 120.0);
    const double beta11 = hom_coincidence(src, twin, s);
    CHECK(beta11 == Catch::Approx(0.5).margin(0.02));
  }
}

TEST_CASE("total variation distance", "[decomposition]") {
  PhotonNumberDistribution p({3}), q({3});
  p[0] = 1.0;
  q[1] = 1.0;
  CHECK(tvd(p, p) == 0.0);
  CHECK(tvd(p, q) == Catch::Approx(1.0));
  std::mt19937_64 rng(43);
  PhotonNumberDistribution r({3});
  double norm = 0.0;
  for (int i = 0; i < 3; ++i) norm += (r[i] = zpgsim_test::uniform(rng));
  for (int i = 0; i < 3; ++i) r[i] /= norm;
  CHECK(tvd(p, r) == Catch::Approx(tvd(r, p)));
  SECTION("mismatched supports use the union") {
    PhotonNumberDistribution wide({5});
    wide[1] = 1.0;
    CHECK(tvd(q, wide) == Catch::Approx(0.0).margin(1e-15));
  }
}

TEST_CASE("permuting sources and circuit columns permutes counts", "[decomposition]") {
  SourceSpec a = zpgsim_test::pulsed_emitter(1.1 * kPi, 0.7);
  SourceSpec b = zpgsim_test::pulsed_emitter(2.2 * kPi, 0.4, 1.5);
  const Matrix u = haar_unitary(2, 77);
  Matrix u_swapped(2, 2);
  u_swapped.col(0) = u.col(1);
  u_swapped.col(1) = u.col(0);
  const double t1 = 12.0;
  const PhotonNumberDistribution direct = invert_distribution(batch_generating_solutions(
      EmitterNetwork({a, b}, u), fourier_grid({5, 5}), settings_until(t1)));
  const PhotonNumberDistribution permuted = invert_distribution(batch_generating_solutions(
      EmitterNetwork({b, a}, u_swapped), fourier_grid({5, 5}), settings_until(t1)));
  for (int n1 = 0; n1 < 5; ++n1)
    for (int n2 = 0; n2 < 5; ++n2)
      CHECK(std::abs(direct.prob({n1, n2}) - permuted.prob({n1, n2})) < 1e-8);
}
