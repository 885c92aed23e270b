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

// Self-checks shipped with the library: each suite compares a fast
// implementation against an independent reference.

#ifndef MEDTL_VERIFY_HPP
#define MEDTL_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace medtl::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  std::size_t checks = 0;
  std::size_t failures = 0;
  /// One line per notable value; deterministic for a given seed.
  std::vector<std::string> details;
};

/// Forward algorithm and Viterbi against path enumeration on 200 random
/// instances (L <= 6, T <= 4).
SuiteResult crf_oracle(std::uint64_t seed = 1);
/// The 2 x 2 instance with transitions (0,0)=0.5, (0,1)=-0.5, (1,0)=1.
SuiteResult crf_derived();
/// Finite differences against reverse mode for the LSTM cell, BiLSTM,
/// char-CNN, dense, attention block and CRF NLL, 5 seeds each.
SuiteResult grad_checks(std::uint64_t seed = 1);
/// All 36 (rel(adm), rel(dis), intermediate) combinations plus the three
/// quoted cases.
SuiteResult rule_truth_table();
/// Hand-computed confusion example and 100 equal-support cases.
SuiteResult metrics(std::uint64_t seed = 1);
/// 1000 random round trips and the orphan-I repair table.
SuiteResult iob_codec(std::uint64_t seed = 1);

const std::vector<std::string>& suite_names();
/// Throws UsageError on an unknown name.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 1);
std::vector<SuiteResult> run_all(std::uint64_t seed = 1);

/// "suite <name>: PASS (n checks)" plus indented details.
std::string format_results(const std::vector<SuiteResult>& results);

}  // namespace medtl::verify

#endif  // MEDTL_VERIFY_HPP
