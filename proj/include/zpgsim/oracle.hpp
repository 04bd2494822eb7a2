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

#ifndef ZPGSIM_ORACLE_HPP
#define ZPGSIM_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <utility>
#include <vector>

#include "zpgsim/batch.hpp"
#include "zpgsim/distributions.hpp"
#include "zpgsim/integrate.hpp"
#include "zpgsim/zpg.hpp"

namespace zpgsim {

/// Closed-form zero-photon probability of pure two-level decay from the
/// excited state: exp(-gamma t) + (1 - eta)(1 - exp(-gamma t)).
inline double decay_reference(double gamma, double eta, double t) {
  require(gamma >= 0.0 && t >= 0.0, "decay_reference: gamma and t must be >= 0");
  const double survive = std::exp(-gamma * t);
  return survive + (1.0 - eta) * (1.0 - survive);
}

namespace detail {

// mt19937_64 has a standard-specified sequence; drawing doubles from the raw
// bits keeps results identical across standard libraries.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::pair<double, double> normal_pair(std::mt19937_64& rng) {
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

}  // namespace detail

/// Haar-random M x M unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phases folded into Q. Deterministic under the seed.
inline Matrix haar_unitary(int modes, std::uint64_t seed) {
  require(modes >= 1, "haar_unitary: need at least one mode");
  std::mt19937_64 rng(seed);
  Matrix a(modes, modes);
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j) {
      const auto [re, im] = detail::normal_pair(rng);
      a(i, j) = Complex(re, im);
    }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < modes; ++j) {
    const Complex d = r(j, j);
    const Complex phase = (std::abs(d) == 0.0) ? Complex(1.0) : d / std::abs(d);
    q.col(j) *= phase;
  }
  return q;
}

/// Permanent by direct permutation expansion; trustworthy for n <= 6.
inline Complex permanent(const Matrix& a) {
  require(a.rows() == a.cols(), "permanent: matrix must be square");
  const int n = static_cast<int>(a.rows());
  if (n == 0) return Complex(1.0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Complex sum = 0.0;
  do {
    Complex term = 1.0;
    for (int i = 0; i < n; ++i) term *= a(i, perm[static_cast<std::size_t>(i)]);
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

/// Output distribution of ideal, mutually indistinguishable single photons
/// entering the circuit at the occupied inputs:
/// p(T) = |Perm(U_{T,S})|^2 / prod_j T_j!.
inline PhotonNumberDistribution ideal_interference_distribution(const Matrix& unitary,
                                                                const std::vector<int>& occupied) {
  const int m = static_cast<int>(unitary.rows());
  require(unitary.cols() == m, "ideal_interference_distribution: unitary must be square");
  require(m <= 6, "ideal_interference_distribution: refused for more than 6 modes");
  require(static_cast<int>(occupied.size()) == m,
          "ideal_interference_distribution: occupation vector length mismatch");
  std::vector<int> inputs;
  for (int i = 0; i < m; ++i) {
    require(occupied[static_cast<std::size_t>(i)] == 0 || occupied[static_cast<std::size_t>(i)] == 1,
            "ideal_interference_distribution: occupations must be 0/1");
    if (occupied[static_cast<std::size_t>(i)] == 1) inputs.push_back(i);
  }
  const int n = static_cast<int>(inputs.size());

  PhotonNumberDistribution dist(std::vector<int>(static_cast<std::size_t>(m), n + 1));
  std::vector<int> pattern(static_cast<std::size_t>(m), 0);
  // Enumerate output patterns T with sum T_j = n.
  auto emit = [&](const std::vector<int>& t) {
    Matrix sub(n, n);
    int row = 0;
    double norm = 1.0;
    for (int j = 0; j < m; ++j) {
      for (int rep = 0; rep < t[static_cast<std::size_t>(j)]; ++rep) {
        for (int c = 0; c < n; ++c) sub(row, c) = unitary(j, inputs[static_cast<std::size_t>(c)]);
        ++row;
      }
      for (int rep = 2; rep <= t[static_cast<std::size_t>(j)]; ++rep) norm *= rep;
    }
    const double p = std::norm(permanent(sub)) / norm;
    dist[static_cast<int>(dist.flat_index(t))] = p;
  };
  auto recurse = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == m - 1) {
      pattern[static_cast<std::size_t>(mode)] = remaining;
      emit(pattern);
      return;
    }
    for (int take = 0; take <= remaining; ++take) {
      pattern[static_cast<std::size_t>(mode)] = take;
      self(self, mode + 1, remaining - take);
    }
  };
  recurse(recurse, 0, n);
  return dist;
}

/// Nested-quadrature reference for the photon-number decomposition.
struct QuadratureSettings {
  /// Uniform mesh density, in points per unit of simulation time (times are
  /// in units of the reference decay rate, so this is points per lifetime).
  /// Published comparisons should use at least 20.
  int points_per_lifetime = 40;
  /// Highest total photon order computed. Scheme is composite trapezoid.
  int n_max = 2;
};

struct RecursiveOracleResult {
  /// p(n) for all count vectors with sum n_j <= n_max.
  std::map<std::vector<int>, double> probs;
  /// Number of weighted integrand terms summed; grows as (mesh points)^n_max.
  long long evaluations = 0;
  int mesh_points = 0;
};

/// Photon-number probabilities by recursive integration over jump times:
/// each detected photon inserts a jump between cached zero-photon segment
/// propagators, and the jump times are integrated on a uniform mesh with
/// iterated composite-trapezoid weights. Deliberately scales as
/// (mesh points)^n_max; this is the slow reference the ZPG path is checked
/// against.
inline RecursiveOracleResult recursive_pn(const EmitterNetwork& network,
                                          const QuadratureSettings& quad,
                                          const PropagationSettings& settings_in) {
  require(quad.points_per_lifetime >= 1, "recursive_pn: mesh density must be >= 1");
  require(quad.n_max >= 0, "recursive_pn: n_max must be >= 0");
  const PropagationSettings settings = resolve_horizon(settings_in, network);
  const double t0 = settings.t0;
  const double t1 = settings.horizon();
  const int segments = std::max(1, static_cast<int>(std::lround((t1 - t0) * quad.points_per_lifetime)));
  const int points = segments + 1;

  if (quad.n_max > 0 && std::pow(static_cast<double>(points), quad.n_max) > 1e8) {
    std::ostringstream msg;
    msg << "recursive_pn: refused, estimated cost " << points << "^" << quad.n_max << " = "
        << std::pow(static_cast<double>(points), quad.n_max) << " evaluations exceeds 1e8";
    throw GuardRefusal(msg.str());
  }

  const double h = (t1 - t0) / segments;
  const int m = network.modes();
  const int d = network.space().total_dim();
  const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;

  // Lossless zero-photon generator (all virtual efficiencies 1) and the
  // per-detector jump superoperators J_j rho = D_j rho D_j^dag with
  // D_j = sum_i U_ji sqrt(gamma_i) c_i.
  const TimeDependentGenerator zpg =
      build_zpg(network, VirtualDetectorConfig::lossless(m));
  std::vector<Matrix> jumps;
  for (int j = 0; j < m; ++j) {
    Matrix dj = Matrix::Zero(d, d);
    for (int i = 0; i < m; ++i) {
      const double gi = network.collection_rate(i);
      if (gi > 0.0)
        dj += network.unitary()(j, i) * std::sqrt(gi) * network.embedded_collection_op(i);
    }
    jumps.push_back(kron(dj.conjugate(), dj));
  }

  // Cached mesh data: one-segment propagators, the forward zero-photon
  // states, and the backward trace functionals.
  std::vector<Matrix> seg(static_cast<std::size_t>(segments));
  for (int s = 0; s < segments; ++s) {
    PropagationSettings local = settings;
    local.t0 = t0 + s * h;
    local.t1 = t0 + (s + 1) * h;
    seg[static_cast<std::size_t>(s)] = propagate_map(zpg, local);
  }
  std::vector<Eigen::RowVectorXcd> tail(static_cast<std::size_t>(points));
  Eigen::RowVectorXcd trace_row = Eigen::RowVectorXcd::Zero(d2);
  for (int i = 0; i < d; ++i) trace_row(static_cast<Eigen::Index>(i) * d + i) = 1.0;
  tail[static_cast<std::size_t>(segments)] = trace_row;
  for (int s = segments - 1; s >= 0; --s)
    tail[static_cast<std::size_t>(s)].noalias() =
        tail[static_cast<std::size_t>(s + 1)] * seg[static_cast<std::size_t>(s)];

  std::vector<bool> jump_active;
  for (const Matrix& j : jumps) jump_active.push_back(!j.isZero(0.0));

  RecursiveOracleResult result;
  result.mesh_points = points;
  std::map<std::vector<int>, Complex> acc;
  std::vector<int> counts(static_cast<std::size_t>(m), 0);
  std::vector<Vector> run(static_cast<std::size_t>(quad.n_max) + 1),
      scratch(static_cast<std::size_t>(quad.n_max) + 1);

  // Depth-first sum over ordered jump-time tuples. Each node carries the
  // state just after its jump, with all resolved quadrature weights folded
  // in; the halving of a level's weight at a shared upper endpoint is
  // applied when the next jump lands on the same mesh point.
  auto close = [&](int mesh, const Vector& s) {
    const double w = (mesh == segments) ? 0.5 : 1.0;
    acc[counts] += w * (tail[static_cast<std::size_t>(mesh)] * s)(0);
    ++result.evaluations;
  };
  auto extend = [&](auto&& self, int level, int mesh, const Vector& s) -> void {
    close(mesh, s);
    if (level == quad.n_max) return;
    Vector& state = run[static_cast<std::size_t>(level)];
    Vector& tmp = scratch[static_cast<std::size_t>(level)];
    state = s;
    for (int mp = mesh; mp <= segments; ++mp) {
      if (mp > mesh) {
        tmp.noalias() = seg[static_cast<std::size_t>(mp - 1)] * state;
        state.swap(tmp);
      }
      if (level >= 1 && mp == 0) continue;  // empty inner integral
      const double factor =
          h * ((mp == 0) ? 0.5 : 1.0) * ((level >= 1 && mp == mesh) ? 0.5 : 1.0);
      for (int j = 0; j < m; ++j) {
        if (!jump_active[static_cast<std::size_t>(j)]) continue;
        ++counts[static_cast<std::size_t>(j)];
        tmp.noalias() = factor * (jumps[static_cast<std::size_t>(j)] * state);
        self(self, level + 1, mp, tmp);
        --counts[static_cast<std::size_t>(j)];
      }
    }
  };
  const Vector initial = vectorize(network.joint_initial_state());
  extend(extend, 0, 0, initial);

  for (const auto& [n, value] : acc) result.probs[n] = value.real();
  return result;
}

}  // namespace zpgsim

#endif  // ZPGSIM_ORACLE_HPP
