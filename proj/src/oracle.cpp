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

#include "medtl/oracle.hpp"

#include <cmath>

#include "medtl/error.hpp"

namespace medtl::oracle {

long double path_score(const num::Tensor& e, const num::Tensor& trans, const std::vector<int>& tags) {
  const std::size_t T = e.cols();
  long double s = trans(T, static_cast<std::size_t>(tags.front()));
  for (std::size_t t = 0; t < tags.size(); ++t) {
    s += e(t, static_cast<std::size_t>(tags[t]));
    if (t > 0) s += trans(static_cast<std::size_t>(tags[t - 1]), static_cast<std::size_t>(tags[t]));
  }
  return s + trans(static_cast<std::size_t>(tags.back()), T + 1);
}

namespace {

// True when a should win a tie against b: compare from the last position back.
bool reverse_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t k = a.size(); k-- > 0;) {
    if (a[k] != b[k]) return a[k] < b[k];
  }
  return false;
}

}  // namespace

PathEnumeration enumerate_paths(const num::Tensor& e, const num::Tensor& trans, double tie_tol) {
  const std::size_t L = e.rows(), T = e.cols();
  if (L == 0 || T == 0) throw ShapeError("enumerate_paths: empty emissions");
  std::vector<std::pair<long double, std::vector<int>>> all;
  std::vector<int> tags(L, 0);
  while (true) {
    all.emplace_back(path_score(e, trans, tags), tags);
    std::size_t k = 0;
    while (k < L && ++tags[k] == static_cast<int>(T)) tags[k++] = 0;
    if (k == L) break;
  }
  long double best = all.front().first;
  for (const auto& [s, p] : all) best = std::max(best, s);
  long double z = 0.0L;
  for (const auto& [s, p] : all) z += std::exp(s - best);

  PathEnumeration out;
  out.n_paths = all.size();
  out.log_partition = static_cast<double>(best + std::log(z));
  out.best_score = static_cast<double>(best);
  bool have = false;
  for (const auto& [s, p] : all) {
    if (best - s > tie_tol) continue;
    if (!have || reverse_lex_less(p, out.best_path)) {
      out.best_path = p;
      have = true;
    }
  }
  return out;
}

}  // namespace medtl::oracle
