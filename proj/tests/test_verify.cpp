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

#include "doctest.h"
#include "medtl/corpus.hpp"
#include "medtl/error.hpp"
#include "medtl/verify.hpp"

using namespace medtl;

TEST_CASE("every suite passes") {
  const auto results = verify::run_all(1);
  REQUIRE(results.size() == verify::suite_names().size());
  for (const auto& r : results) {
    CAPTURE(r.name);
    CHECK(r.passed);
    CHECK(r.failures == 0);
    CHECK(r.checks > 0);
  }
}

TEST_CASE("suite check counts") {
  CHECK(verify::crf_oracle().checks == 600);
  CHECK(verify::grad_checks().checks == 30);
  CHECK(verify::rule_truth_table().checks == 39);
  CHECK(verify::iob_codec().checks == 1020);
  CHECK(verify::metrics().checks == 105);
}

TEST_CASE("report is deterministic per seed") {
  const auto a = verify::format_results(verify::run_all(5));
  const auto b = verify::format_results(verify::run_all(5));
  CHECK(a == b);
  CHECK(a.find("6/6 suites passed") != std::string::npos);
}

TEST_CASE("unknown suite") {
  CHECK_THROWS_AS(verify::run_suite("nope"), UsageError);
}

TEST_CASE("spans_to_labels") {
  corpus::EntitySpan s;
  s.tag = "m";
  s.start_token = 1;
  s.end_token = 2;
  CHECK(corpus::spans_to_labels(4, {s}) == std::vector<std::string>{"O", "B-m", "I-m", "O"});
  s.end_token = 4;
  CHECK_THROWS_AS(corpus::spans_to_labels(4, {s}), RangeError);
}
