// Copyright 2026 The medtimeline Authors. All Rights Reserved.
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

// Linear-chain CRF over T tags with virtual START (index T) and STOP
// (index T + 1). Transition matrices are (T+2) x (T+2) with trans(i, j) the
// score of moving from tag i to tag j. Entries into START and out of STOP
// are never read.

#ifndef MEDTL_CRF_HPP
#define MEDTL_CRF_HPP

#include <span>
#include <string>
#include <vector>

#include "medtl/num/graph.hpp"
#include "medtl/num/tensor.hpp"

namespace medtl {
class Rng;
namespace corpus {
class TagScheme;
}
}  // namespace medtl

namespace medtl::crf {

using num::Tensor;

struct CrfParams {
  num::Parameter transitions;

  /// Uniform(-0.1, 0.1) on the reachable entries, zero elsewhere.
  static CrfParams init(const std::string& name, std::size_t num_tags, Rng& rng);
  static CrfParams zeros(const std::string& name, std::size_t num_tags);

  std::size_t num_tags() const { return transitions.value.rows() - 2; }
  std::size_t start() const { return num_tags(); }
  std::size_t stop() const { return num_tags() + 1; }
  /// Trainable entries: (T+1)^2.
  std::size_t count() const { return (num_tags() + 1) * (num_tags() + 1); }
};

/// Path score of `tags` (values in [0, T)). Throws RangeError on invalid tags
/// and ShapeError on size mismatches or L == 0.
double score_sequence(const Tensor& emissions, const Tensor& transitions, std::span<const int> tags);

/// log of the sum of exp(score) over all T^L paths (forward recursion).
double log_partition(const Tensor& emissions, const Tensor& transitions);

struct ViterbiResult {
  std::vector<int> tags;
  double score = 0.0;
};

/// Best path. Ties go to the smallest tag index at every backtrace step.
ViterbiResult viterbi(const Tensor& emissions, const Tensor& transitions);

/// Per-position tag marginals, L x T.
Tensor marginals(const Tensor& emissions, const Tensor& transitions);

/// log_partition - score_sequence(gold) as a graph node. Gradients reach both
/// the emissions (L x T) and the transitions ((T+2) x (T+2)).
num::Var crf_nll(num::Graph& g, num::Var emissions, num::Var transitions, std::span<const int> gold);

/// Additive (T+2) x (T+2) mask over the scheme's non-PAD labels (tag k is
/// label k + 1): -inf on O -> I-x, B-x/I-x -> I-y (y != x) and START -> I-x.
Tensor iob_constraint_mask(const corpus::TagScheme& scheme);

/// transitions + mask.
Tensor constrained(const Tensor& transitions, const Tensor& mask);

}  // namespace medtl::crf

#endif  // MEDTL_CRF_HPP
