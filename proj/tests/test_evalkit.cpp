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

#include <cmath>

#include "doctest.h"
#include "json.hpp"
#include "medtl/error.hpp"
#include "medtl/evalkit.hpp"
#include "medtl/rng.hpp"

using namespace medtl;
using namespace medtl::evalkit;
using corpus::EntitySpan;

namespace {

EntitySpan span(const std::string& tag, std::size_t b, std::size_t e) {
  EntitySpan s;
  s.tag = tag;
  s.start_token = b;
  s.end_token = e;
  return s;
}

std::vector<std::string> random_labels(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("L" + std::to_string(rng.below(k)));
  return out;
}

}  // namespace

TEST_CASE("prf conventions") {
  const auto a = prf(1, 0, 1);
  CHECK(a.precision == 1.0);
  CHECK(a.recall == 0.5);
  CHECK(a.f1 == 2.0 / 3.0);
  const auto z = prf(0, 0, 0);
  CHECK(z.precision == 0.0);
  CHECK(z.recall == 0.0);
  CHECK(z.f1 == 0.0);
  const auto one = prf(3, 0, 0);
  CHECK(one.precision == 1.0);
  CHECK(one.recall == 1.0);
  CHECK(one.f1 == 1.0);
  CHECK(prf(0, 4, 0).f1 == 0.0);
}

TEST_CASE("hand-computed confusion example") {
  const auto c = confusion_counts({"A", "A", "B", "B"}, {"A", "B", "B", "B"});
  CHECK(c.of("A") == Counts{1, 0, 1, 2});
  CHECK(c.of("B") == Counts{2, 1, 0, 2});
  CHECK(c.correct == 3);
  CHECK(c.total == 4);
  const auto r = aggregate(c);
  REQUIRE(r.labels.size() == 2);
  CHECK(r.labels[0].metrics.precision == 1.0);
  CHECK(r.labels[0].metrics.recall == 0.5);
  CHECK(r.labels[0].metrics.f1 == 2.0 / 3.0);
  CHECK(r.macro.f1 == doctest::Approx((2.0 / 3.0 + 0.8) / 2).epsilon(1e-15));
  CHECK(std::abs(r.macro.f1 - 0.7333) < 1e-4);
  CHECK(r.weighted.f1 == doctest::Approx(r.macro.f1).epsilon(1e-15));
  CHECK(r.accuracy == 0.75);
}

TEST_CASE("confusion edge cases") {
  const auto same = confusion_counts({"A", "B", "O"}, {"A", "B", "O"});
  for (const auto& k : same.counts) {
    CHECK(k.fp == 0);
    CHECK(k.fn == 0);
  }
  const auto empty = confusion_counts(std::vector<std::string>{}, {});
  CHECK(empty.total == 0);
  CHECK(empty.labels.empty());
  CHECK(aggregate(empty).accuracy == 0.0);
  CHECK_THROWS_AS(confusion_counts({"A"}, {"A", "B"}), UsageError);

  // Listed order first, unseen labels appended.
  const auto ordered = confusion_counts({"B", "C"}, {"B", "C"}, std::vector<std::string>{"Z", "B"});
  CHECK(ordered.labels == std::vector<std::string>{"Z", "B", "C"});
}

TEST_CASE("padding excluded unless requested") {
  const std::vector<std::string> gold = {"A", "PAD", "PAD", "B"};
  const std::vector<std::string> pred = {"A", "PAD", "A", "PAD"};
  const auto ex = confusion_counts(gold, pred, {"PAD", "A", "B"});
  CHECK(ex.total == 2);
  CHECK(ex.labels == std::vector<std::string>{"A", "B"});
  CHECK(ex.of("B").fn == 1);
  CHECK(ex.of("A").fp == 0);
  const auto in = confusion_counts(gold, pred, {"PAD", "A", "B"}, true);
  CHECK(in.total == 4);
  CHECK(in.labels.front() == "PAD");
  CHECK(in.of("PAD") == Counts{1, 1, 1, 2});
  CHECK(in.of("A").fp == 1);
  CHECK(aggregate(in).padding_included);
}

TEST_CASE("aggregate examples") {
  const auto r = aggregate({{"x", {1.0, 1.0, 1.0}, 9}, {"y", {0.0, 0.0, 0.0}, 1}}, 9, 10);
  CHECK(r.macro.f1 == 0.5);
  CHECK(r.weighted.f1 == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(r.total_support == 10);
  const auto single = aggregate({{"x", {0.25, 0.5, 1.0 / 3}, 4}}, 2, 4);
  CHECK(single.macro.f1 == single.labels[0].metrics.f1);
  CHECK(single.weighted.precision == single.labels[0].metrics.precision);
}

TEST_CASE("macro equals weighted under equal supports") {
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + rng.below(5), per = 1 + rng.below(20);
    std::vector<std::string> gold, pred;
    for (std::size_t l = 0; l < k; ++l) {
      for (std::size_t i = 0; i < per; ++i) {
        gold.push_back("L" + std::to_string(l));
        pred.push_back("L" + std::to_string(rng.below(k)));
      }
    }
    const auto r = aggregate(confusion_counts(gold, pred));
    CHECK(r.macro.precision == doctest::Approx(r.weighted.precision).epsilon(1e-12));
    CHECK(r.macro.recall == doctest::Approx(r.weighted.recall).epsilon(1e-12));
    CHECK(r.macro.f1 == doctest::Approx(r.weighted.f1).epsilon(1e-12));
  }
}

TEST_CASE("accuracy equals weighted recall") {
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto gold = random_labels(rng, 1 + rng.below(60), 4);
    const auto pred = random_labels(rng, gold.size(), 4);
    const auto r = aggregate(confusion_counts(gold, pred));
    CHECK(r.accuracy == doctest::Approx(r.weighted.recall).epsilon(1e-12));
    std::size_t s = 0;
    for (const auto& l : r.labels) s += l.support;
    CHECK(s == r.total_support);
    for (const auto& l : r.labels) {
      CHECK(l.metrics.f1 >= 0.0);
      CHECK(l.metrics.f1 <= 1.0);
    }
  }
}

TEST_CASE("metrics invariant under relabeling") {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    auto gold = random_labels(rng, 40, 3);
    auto pred = random_labels(rng, 40, 3);
    const auto a = aggregate(confusion_counts(gold, pred));
    auto rename = [](std::string& s) { s = s == "L0" ? "L2" : s == "L2" ? "L0" : s; };
    for (auto& s : gold) rename(s);
    for (auto& s : pred) rename(s);
    const auto b = aggregate(confusion_counts(gold, pred));
    CHECK(a.macro.f1 == doctest::Approx(b.macro.f1).epsilon(1e-12));
    CHECK(a.weighted.f1 == doctest::Approx(b.weighted.f1).epsilon(1e-12));
    CHECK(a.accuracy == b.accuracy);
  }
}

TEST_CASE("sentence-wise counts and merging") {
  const std::vector<std::vector<std::string>> gold = {{"A", "B"}, {"A"}};
  const std::vector<std::vector<std::string>> pred = {{"A", "A"}, {"A"}};
  const auto c = sentence_confusion(gold, pred);
  CHECK(c.total == 3);
  CHECK(c.of("A") == Counts{2, 1, 0, 2});
  Confusion m = confusion_counts(std::vector<std::string>{"A", "B"}, {"A", "A"});
  m.merge(confusion_counts({"A"}, {"A"}));
  CHECK(m.of("A") == c.of("A"));
  CHECK(m.of("B") == c.of("B"));
  CHECK_THROWS_AS(sentence_confusion(gold, {{"A", "A"}}), UsageError);
}

TEST_CASE("span exact matching") {
  const std::vector<EntitySpan> gold = {span("m", 0, 0), span("do", 2, 3), span("m", 5, 6)};
  const auto same = span_prf(gold, gold);
  CHECK(same.overall_metrics.precision == 1.0);
  CHECK(same.overall_metrics.recall == 1.0);
  CHECK(same.overall_metrics.f1 == 1.0);

  const auto shifted = span_prf({span("m", 0, 1)}, {span("m", 0, 2)});
  CHECK(shifted.overall.tp == 0);
  CHECK(shifted.overall.fp == 1);
  CHECK(shifted.overall.fn == 1);
  CHECK(span_prf({span("m", 0, 1)}, {span("do", 0, 1)}).overall.tp == 0);

  // k of n exact, nothing else predicted.
  const auto part = span_prf(gold, {gold[0], gold[2]});
  CHECK(part.overall_metrics.recall == 2.0 / 3.0);
  CHECK(part.overall_metrics.precision == 1.0);
  CHECK(part.per_tag.at("do").fn == 1);

  // A gold span is matched at most once.
  const auto dup = span_prf({span("m", 0, 0)}, {span("m", 0, 0), span("m", 0, 0)});
  CHECK(dup.overall.tp == 1);
  CHECK(dup.overall.fp == 1);
  const auto none = span_prf({}, {});
  CHECK(none.overall_metrics.f1 == 0.0);
}

TEST_CASE("text table and JSON") {
  const auto r = aggregate(confusion_counts({"A", "A", "B", "B"}, {"A", "B", "B", "B"}));
  const std::string t = format_table(r);
  CHECK(t.find("precision") != std::string::npos);
  CHECK(t.find("   macro avg") != std::string::npos);
  CHECK(t.find("weighted avg") != std::string::npos);
  CHECK(t.find("100.00") != std::string::npos);
  CHECK(t.find("66.67") != std::string::npos);
  CHECK(t.find("73.33") != std::string::npos);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["labels"].size() == 2);
  CHECK(j["labels"][0]["label"] == "A");
  CHECK(j["accuracy"].get<double>() == 0.75);
  CHECK(j["padding_included"] == false);
  const auto s = nlohmann::json::parse(to_json(span_prf({span("m", 0, 0)}, {span("m", 0, 0)})));
  CHECK(s["overall"]["f1"].get<double>() == 1.0);
}
