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

#ifndef ZPGSIM_VIRTUAL_GRID_HPP
#define ZPGSIM_VIRTUAL_GRID_HPP

#include <cmath>
#include <utility>
#include <vector>

#include "zpgsim/types.hpp"

namespace zpgsim {

/// One vector z of virtual detector parameters, stored through its inverse
/// so the lossless limit z -> infinity is the exact marker z^-1 = 0.
/// Virtual efficiencies are eta_j = 1 - z_j^-1.
class VirtualDetectorConfig {
 public:
  static VirtualDetectorConfig from_z_inverse(std::vector<Complex> z_inv) {
    for (const Complex& zi : z_inv)
      require(std::isfinite(zi.real()) && std::isfinite(zi.imag()),
              "VirtualDetectorConfig: z = 0 (infinite z^-1) is not admissible");
    return VirtualDetectorConfig(std::move(z_inv));
  }

  static VirtualDetectorConfig from_efficiencies(const std::vector<Complex>& eta) {
    std::vector<Complex> z_inv(eta.size());
    for (std::size_t j = 0; j < eta.size(); ++j) z_inv[j] = Complex(1.0) - eta[j];
    return from_z_inverse(std::move(z_inv));
  }

  static VirtualDetectorConfig lossless(int detectors) {
    return VirtualDetectorConfig(std::vector<Complex>(static_cast<std::size_t>(detectors),
                                                      Complex(0.0)));
  }

  int detectors() const { return static_cast<int>(z_inv_.size()); }
  Complex z_inverse(int j) const { return z_inv_.at(static_cast<std::size_t>(j)); }
  Complex efficiency(int j) const { return Complex(1.0) - z_inverse(j); }

  std::vector<Complex> efficiencies() const {
    std::vector<Complex> eta(z_inv_.size());
    for (std::size_t j = 0; j < z_inv_.size(); ++j) eta[j] = Complex(1.0) - z_inv_[j];
    return eta;
  }

  bool is_real() const {
    for (const Complex& zi : z_inv_)
      if (zi.imag() != 0.0) return false;
    return true;
  }

 private:
  explicit VirtualDetectorConfig(std::vector<Complex> z_inv) : z_inv_(std::move(z_inv)) {
    require(!z_inv_.empty(), "VirtualDetectorConfig: need at least one detector");
  }

  std::vector<Complex> z_inv_;
};

enum class GridKind { fourier, threshold_corners, custom };

/// Ordered set of virtual detector configurations.
///
/// Fourier grids enumerate the full tensor grid of roots of unity
/// z_j^-1 = exp(2*pi*i*k_j/N_j) in row-major order over (k_1,...,k_M);
/// the index <-> frequency correspondence is relied on bit-exactly by the
/// inverse transform. Threshold corner grids enumerate eta_j in {0,1} in
/// the integer order of the loss bits L_j = 1 - eta_j (L_1 most
/// significant).
class VirtualGrid {
 public:
  static VirtualGrid fourier(std::vector<int> truncations) {
    require(!truncations.empty(), "fourier grid: need at least one detector");
    int total = 1;
    for (int n : truncations) {
      require(n >= 1, "fourier grid: truncations must be >= 1");
      total *= n;
    }
    const int m = static_cast<int>(truncations.size());
    std::vector<VirtualDetectorConfig> configs;
    configs.reserve(static_cast<std::size_t>(total));
    std::vector<int> k(truncations.size(), 0);
    for (int flat = 0; flat < total; ++flat) {
      std::vector<Complex> z_inv(static_cast<std::size_t>(m));
      for (int j = 0; j < m; ++j) {
        const double angle = 2.0 * kPi * k[static_cast<std::size_t>(j)] /
                             truncations[static_cast<std::size_t>(j)];
        z_inv[static_cast<std::size_t>(j)] = std::polar(1.0, angle);
      }
      // k = 0 must be the exact trace-preserving point.
      for (int j = 0; j < m; ++j)
        if (k[static_cast<std::size_t>(j)] == 0) z_inv[static_cast<std::size_t>(j)] = Complex(1.0);
      configs.push_back(VirtualDetectorConfig::from_z_inverse(std::move(z_inv)));
      for (int j = m - 1; j >= 0; --j) {
        if (++k[static_cast<std::size_t>(j)] < truncations[static_cast<std::size_t>(j)]) break;
        k[static_cast<std::size_t>(j)] = 0;
      }
    }
    return VirtualGrid(GridKind::fourier, std::move(truncations), std::move(configs));
  }

  static VirtualGrid threshold_corners(int detectors) {
    require(detectors >= 1, "threshold corner grid: need at least one detector");
    require(detectors < 31, "threshold corner grid: detector count too large");
    const int total = 1 << detectors;
    std::vector<VirtualDetectorConfig> configs;
    configs.reserve(static_cast<std::size_t>(total));
    for (int bits = 0; bits < total; ++bits) {
      std::vector<Complex> eta(static_cast<std::size_t>(detectors));
      for (int j = 0; j < detectors; ++j) {
        const int loss = (bits >> (detectors - 1 - j)) & 1;
        eta[static_cast<std::size_t>(j)] = Complex(1.0 - loss);
      }
      configs.push_back(VirtualDetectorConfig::from_efficiencies(eta));
    }
    return VirtualGrid(GridKind::threshold_corners, std::vector<int>(detectors, 2),
                       std::move(configs));
  }

  static VirtualGrid custom(std::vector<VirtualDetectorConfig> configs) {
    require(!configs.empty(), "custom grid: need at least one config");
    const int m = configs.front().detectors();
    for (const auto& c : configs)
      require(c.detectors() == m, "custom grid: inconsistent detector counts");
    return VirtualGrid(GridKind::custom, {}, std::move(configs));
  }

  GridKind kind() const { return kind_; }
  const std::vector<int>& truncations() const { return truncations_; }
  int detectors() const { return configs_.front().detectors(); }
  int size() const { return static_cast<int>(configs_.size()); }
  const VirtualDetectorConfig& config(int idx) const {
    return configs_.at(static_cast<std::size_t>(idx));
  }

  /// Row-major multi-index of a flat fourier-grid index.
  std::vector<int> multi_index(int flat) const {
    std::vector<int> k(truncations_.size(), 0);
    for (int j = static_cast<int>(truncations_.size()) - 1; j >= 0; --j) {
      const int n = truncations_[static_cast<std::size_t>(j)];
      k[static_cast<std::size_t>(j)] = flat % n;
      flat /= n;
    }
    return k;
  }

  /// Index of the config with complex-conjugated z. Returns idx itself for
  /// self-conjugate configs and -1 when no partner is known in the grid.
  int conjugate_partner(int idx) const {
    switch (kind_) {
      case GridKind::fourier: {
        std::vector<int> k = multi_index(idx);
        int flat = 0;
        for (std::size_t j = 0; j < k.size(); ++j) {
          const int n = truncations_[j];
          flat = flat * n + (k[j] == 0 ? 0 : n - k[j]);
        }
        return flat;
      }
      case GridKind::threshold_corners:
        return idx;
      case GridKind::custom:
        return config(idx).is_real() ? idx : -1;
    }
    return -1;
  }

 private:
  VirtualGrid(GridKind kind, std::vector<int> truncations,
              std::vector<VirtualDetectorConfig> configs)
      : kind_(kind), truncations_(std::move(truncations)), configs_(std::move(configs)) {}

  GridKind kind_;
  std::vector<int> truncations_;
  std::vector<VirtualDetectorConfig> configs_;
};

inline VirtualGrid fourier_grid(std::vector<int> truncations) {
  return VirtualGrid::fourier(std::move(truncations));
}

inline VirtualGrid threshold_corner_grid(int detectors) {
  return VirtualGrid::threshold_corners(detectors);
}

}  // namespace zpgsim

#endif  // ZPGSIM_VIRTUAL_GRID_HPP
