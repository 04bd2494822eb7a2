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

#ifndef ZPGSIM_NETWORK_HPP
#define ZPGSIM_NETWORK_HPP

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "zpgsim/generator.hpp"
#include "zpgsim/hilbert.hpp"
#include "zpgsim/source.hpp"
#include "zpgsim/superoperator.hpp"

namespace zpgsim {

/// Total Lindbladian of independent sources, embedded into their joint
/// space: sum_i [ -i H_i(t) + sum_k gamma_ik D_ik ]. Vacuum sources
/// (collection rate 0) contribute nothing. Driven terms with identical
/// coefficients are merged into a single superoperator.
inline TimeDependentGenerator lindbladian(const std::vector<SourceSpec>& sources,
                                          const HilbertSpace& space) {
  require(static_cast<int>(sources.size()) == space.slots(),
          "lindbladian: source count does not match space");
  Superoperator constant = Superoperator::zero(space);
  std::vector<std::pair<Superoperator, DriveCoefficient>> driven;
  std::map<std::string, std::size_t> merge_slots;

  for (int i = 0; i < space.slots(); ++i) {
    const SourceSpec& src = sources[static_cast<std::size_t>(i)];
    validate_source(src);
    require(src.dim == space.dim(i), "lindbladian: source dim does not match slot");
    if (src.is_vacuum() && src.hamiltonian_terms.empty() && src.dissipation_channels.empty())
      continue;
    for (const auto& term : src.hamiltonian_terms) {
      OperatorMatrix h = embed_operator(term.op, i, space);
      Superoperator comm = commutator_superop(h);
      if (!term.coeff.value) throw std::invalid_argument("lindbladian: empty coefficient");
      if (term.coeff.merge_key) {
        auto it = merge_slots.find(*term.coeff.merge_key);
        if (it != merge_slots.end()) {
          driven[it->second].first += comm;
          continue;
        }
        merge_slots[*term.coeff.merge_key] = driven.size();
      }
      driven.emplace_back(std::move(comm), term.coeff);
    }
    for (const auto& chan : src.dissipation_channels) {
      OperatorMatrix c = embed_operator(chan.op, i, space);
      constant += chan.rate * dissipator_superop(c);
    }
    if (src.collection_rate > 0.0) {
      OperatorMatrix c = embed_operator(src.collection_op, i, space);
      constant += src.collection_rate * dissipator_superop(c);
    }
  }
  return TimeDependentGenerator(std::move(constant), std::move(driven));
}

/// M sources feeding an M x M linear-optical unitary, one detector per
/// output mode. Immutable after construction.
class EmitterNetwork {
 public:
  EmitterNetwork(std::vector<SourceSpec> sources, Matrix unitary)
      : sources_(std::move(sources)),
        unitary_(std::move(unitary)),
        space_(derive_space(sources_)) {
    const int m = modes();
    require(unitary_.rows() == m && unitary_.cols() == m,
            "EmitterNetwork: unitary must be M x M with M = source count");
    require(max_abs(unitary_.adjoint() * unitary_ - Matrix::Identity(m, m)) <= 1e-10,
            "EmitterNetwork: circuit matrix is not unitary to tolerance 1e-10");
    for (const auto& s : sources_) validate_source(s);
    joint_initial_ = Matrix::Identity(1, 1);
    for (const auto& s : sources_) joint_initial_ = kron(joint_initial_, s.initial_state);
    for (int i = 0; i < m; ++i)
      embedded_collection_.push_back(
          embed_operator(sources_[static_cast<std::size_t>(i)].collection_op, i, space_).entries);
  }

  static EmitterNetwork single(SourceSpec source) {
    std::vector<SourceSpec> v;
    v.push_back(std::move(source));
    return EmitterNetwork(std::move(v), Matrix::Identity(1, 1));
  }

  int modes() const { return static_cast<int>(sources_.size()); }
  const std::vector<SourceSpec>& sources() const { return sources_; }
  const Matrix& unitary() const { return unitary_; }
  const HilbertSpace& space() const { return space_; }
  const Matrix& joint_initial_state() const { return joint_initial_; }
  const Matrix& embedded_collection_op(int i) const {
    return embedded_collection_.at(static_cast<std::size_t>(i));
  }
  double collection_rate(int i) const {
    return sources_.at(static_cast<std::size_t>(i)).collection_rate;
  }

  TimeDependentGenerator total_lindbladian() const { return lindbladian(sources_, space_); }

  /// Smallest positive collection rate; infinity if all sources are vacuum.
  double min_collection_rate() const {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& s : sources_)
      if (s.collection_rate > 0.0) g = std::min(g, s.collection_rate);
    return g;
  }

  /// Latest drive support edge, or t0 fallback 0 when nothing is driven.
  double last_drive_breakpoint() const {
    double t = 0.0;
    for (const auto& s : sources_)
      for (const auto& term : s.hamiltonian_terms)
        for (double b : term.coeff.breakpoints) t = std::max(t, b);
    return t;
  }

 private:
  static HilbertSpace derive_space(const std::vector<SourceSpec>& sources) {
    require(!sources.empty(), "EmitterNetwork: need at least one source");
    std::vector<int> dims;
    dims.reserve(sources.size());
    for (const auto& s : sources) dims.push_back(s.dim);
    return HilbertSpace(dims);
  }

  std::vector<SourceSpec> sources_;
  Matrix unitary_;
  HilbertSpace space_;
  Matrix joint_initial_;
  std::vector<Matrix> embedded_collection_;
};

}  // namespace zpgsim

#endif  // ZPGSIM_NETWORK_HPP
