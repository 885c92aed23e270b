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

// Slow reference implementations used to check the fast ones.

#ifndef MEDTL_ORACLE_HPP
#define MEDTL_ORACLE_HPP

#include <vector>

#include "medtl/num/tensor.hpp"

namespace medtl::oracle {

struct PathEnumeration {
  double log_partition = 0.0;
  double best_score = 0.0;
  /// Highest-scoring path; among paths within tie_tol of the best, the one
  /// whose last tag is smallest, then the second-to-last, and so on.
  std::vector<int> best_path;
  std::size_t n_paths = 0;
};

/// Visits all T^L tag paths of a linear-chain CRF whose transitions use
/// START = T and STOP = T + 1. Sums in long double.
PathEnumeration enumerate_paths(const num::Tensor& emissions, const num::Tensor& transitions,
                                double tie_tol = 1e-12);

/// Score of one path, summed term by term in long double.
long double path_score(const num::Tensor& emissions, const num::Tensor& transitions,
                       const std::vector<int>& tags);

}  // namespace medtl::oracle

#endif  // MEDTL_ORACLE_HPP
