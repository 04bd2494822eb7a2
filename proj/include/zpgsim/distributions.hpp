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

#ifndef ZPGSIM_DISTRIBUTIONS_HPP
#define ZPGSIM_DISTRIBUTIONS_HPP

#include <map>
#include <utility>
#include <vector>

#include "zpgsim/types.hpp"

namespace zpgsim {

/// Reconstructed photon-number probabilities over the truncation box
/// 0 <= n_j < N_j, stored row-major, with inversion diagnostics.
class PhotonNumberDistribution {
 public:
  explicit PhotonNumberDistribution(std::vector<int> truncations)
      : truncations_(std::move(truncations)) {
    std::size_t total = 1;
    for (int n : truncations_) {
      require(n >= 1, "PhotonNumberDistribution: truncations must be >= 1");
      total *= static_cast<std::size_t>(n);
    }
    probs_.assign(total, 0.0);
    imag_residues_.assign(total, 0.0);
  }

  const std::vector<int>& truncations() const { return truncations_; }
  int detectors() const { return static_cast<int>(truncations_.size()); }
  int size() const { return static_cast<int>(probs_.size()); }

  double& operator[](int flat) { return probs_.at(static_cast<std::size_t>(flat)); }
  double operator[](int flat) const { return probs_.at(static_cast<std::size_t>(flat)); }

  double prob(const std::vector<int>& counts) const { return probs_.at(flat_index(counts)); }

  std::size_t flat_index(const std::vector<int>& counts) const {
    require(counts.size() == truncations_.size(), "prob: count vector length mismatch");
    std::size_t flat = 0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
      require(counts[j] >= 0 && counts[j] < truncations_[j], "prob: count out of range");
      flat = flat * static_cast<std::size_t>(truncations_[j]) + static_cast<std::size_t>(counts[j]);
    }
    return flat;
  }

  std::vector<int> count_vector(int flat) const {
    std::vector<int> n(truncations_.size(), 0);
    for (int j = static_cast<int>(truncations_.size()) - 1; j >= 0; --j) {
      const int nj = truncations_[static_cast<std::size_t>(j)];
      n[static_cast<std::size_t>(j)] = flat % nj;
      flat /= nj;
    }
    return n;
  }

  double sum() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
  }

  /// Mean of the total detected photon number sum_j n_j.
  double mean_total() const {
    double mu = 0.0;
    for (int flat = 0; flat < size(); ++flat) {
      const auto n = count_vector(flat);
      int total = 0;
      for (int nj : n) total += nj;
      mu += total * probs_[static_cast<std::size_t>(flat)];
    }
    return mu;
  }

  /// sum_n n(n-1) p(n) of the total photon number.
  double second_factorial_moment() const {
    double m2 = 0.0;
    for (int flat = 0; flat < size(); ++flat) {
      const auto n = count_vector(flat);
      int total = 0;
      for (int nj : n) total += nj;
      m2 += static_cast<double>(total) * (total - 1) * probs_[static_cast<std::size_t>(flat)];
    }
    return m2;
  }

  /// Probability mass on the truncation edge (any n_j = N_j - 1); the
  /// aliasing indicator.
  double edge_tail_mass() const {
    double tail = 0.0;
    for (int flat = 0; flat < size(); ++flat) {
      const auto n = count_vector(flat);
      for (std::size_t j = 0; j < n.size(); ++j)
        if (n[j] == truncations_[j] - 1) {
          tail += probs_[static_cast<std::size_t>(flat)];
          break;
        }
    }
    return tail;
  }

  std::map<std::vector<int>, double> as_map() const {
    std::map<std::vector<int>, double> out;
    for (int flat = 0; flat < size(); ++flat)
      out[count_vector(flat)] = probs_[static_cast<std::size_t>(flat)];
    return out;
  }

  double& imag_residue(int flat) { return imag_residues_.at(static_cast<std::size_t>(flat)); }
  double imag_residue(int flat) const { return imag_residues_.at(static_cast<std::size_t>(flat)); }

  /// Maximum absolute imaginary part discarded during inversion, plus any
  /// clamped negative mass.
  double residue = 0.0;
  double tail_mass = 0.0;
  bool aliasing_failure = false;

 private:
  std::vector<int> truncations_;
  std::vector<double> probs_;
  std::vector<double> imag_residues_;
};

/// Click probabilities over threshold-detector bit vectors m in {0,1}^M,
/// indexed with m_1 as the most significant bit.
struct ThresholdDistribution {
  int detectors = 0;
  std::vector<double> probs;

  double prob(const std::vector<int>& clicks) const {
    require(static_cast<int>(clicks.size()) == detectors,
            "ThresholdDistribution: click vector length mismatch");
    std::size_t idx = 0;
    for (int m : clicks) {
      require(m == 0 || m == 1, "ThresholdDistribution: clicks must be 0/1");
      idx = idx * 2 + static_cast<std::size_t>(m);
    }
    return probs.at(idx);
  }

  double sum() const {
    double s = 0.0;
    for (double p : probs) s += p;
    return s;
  }

  /// Single-detector brightness beta = 1 - p0.
  double brightness() const {
    require(detectors == 1, "brightness: defined for a single detector");
    return probs.at(1);
  }
};

/// Conditional source states rho^(n) (unnormalized: Tr rho^(n) = p(n)) and
/// optionally the conditional propagators, on the same index space as a
/// PhotonNumberDistribution.
struct ConditionalStateSet {
  std::vector<int> truncations;
  std::vector<Matrix> states;
  std::vector<Matrix> maps;
  /// Largest Hermiticity deviation removed by the (rho + rho^dag)/2 cleanup.
  double hermiticity_residue = 0.0;

  std::size_t flat_index(const std::vector<int>& counts) const {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      flat = flat * static_cast<std::size_t>(truncations[j]) + static_cast<std::size_t>(counts[j]);
    return flat;
  }

  const Matrix& state(const std::vector<int>& counts) const { return states.at(flat_index(counts)); }
};

}  // namespace zpgsim

#endif  // ZPGSIM_DISTRIBUTIONS_HPP
