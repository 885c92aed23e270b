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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "medtl/corpus.hpp"
#include "medtl/error.hpp"
#include "medtl/relex.hpp"

using namespace medtl;
using namespace medtl::relex;
using corpus::AnnotatedDocument;

namespace {

std::vector<RelationInstance> candidates(const std::vector<AnnotatedDocument>& docs, const embed::Vocab& vocab) {
  std::vector<RelationInstance> out;
  for (const auto& d : docs) {
    auto c = generate_candidates(d, vocab).instances;
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

RelationInstance labeled_stub(Relation r, int tag) {
  RelationInstance i;
  i.doc_id = "d" + std::to_string(tag);
  i.token_ids = {kCls, tag, kSep};
  i.segment_ids = {0, 0, 0};
  i.label = r;
  return i;
}

RelConfig desk_config() {
  RelConfig c;
  c.encoder.hidden = 64;
  c.encoder.heads = 4;
  c.encoder.layers = 1;
  c.encoder.ffn = 128;
  c.encoder.max_len = 64;
  c.filters = 16;
  c.epochs = 30;
  c.patience = 30;
  c.batch_size = 8;
  c.learning_rate = 1e-3;
  c.seed = 3;
  return c;
}

AnnotatedDocument two_dates_doc() {
  const std::string text = "He took Lasix in May 2019 and again in June 2019.\n";
  AnnotatedDocument d = corpus::make_document("two", text);
  d.events.emplace("E0", corpus::span_from_chars(d, "TREATMENT", 8, 13, "E0"));
  d.timexes.emplace("T0", corpus::span_from_chars(d, "DATE", 17, 25, "T0"));
  d.timexes.emplace("T1", corpus::span_from_chars(d, "DATE", 39, 48, "T1"));
  d.tlinks.push_back({"E0", "T1", Relation::After});
  return d;
}

}  // namespace

TEST_CASE("reserved vocabulary ids") {
  const auto v = reserved_vocab();
  CHECK(v.size() == kReservedCount);
  CHECK(v.id("[CLS]") == kCls);
  CHECK(v.id("[SEP]") == kSep);
  CHECK(v.id("[E]") == kEventOpen);
  CHECK(v.id("[/E]") == kEventClose);
  CHECK(v.id("[T]") == kTimeOpen);
  CHECK(v.id("[/T]") == kTimeClose);
}

TEST_CASE("one medication and two dates give two instances") {
  const auto doc = two_dates_doc();
  const auto vocab = build_relation_vocab({doc});
  const auto c = generate_candidates(doc, vocab);
  REQUIRE(c.instances.size() == 2);
  CHECK(c.skipped_overflow == 0);
  CHECK(c.instances[0].time.surface == "May 2019");
  CHECK_FALSE(c.instances[0].label.has_value());
  // E0 AFTER T1 stored the other way round.
  REQUIRE(c.instances[1].label.has_value());
  CHECK(*c.instances[1].label == Relation::Before);

  const auto& ids = c.instances[0].token_ids;
  CHECK(ids.front() == kCls);
  CHECK(ids.back() == kSep);
  CHECK(std::count(ids.begin(), ids.end(), kEventOpen) == 1);
  CHECK(std::count(ids.begin(), ids.end(), kTimeClose) == 1);
  const auto at = [&](int tok) { return std::find(ids.begin(), ids.end(), tok) - ids.begin(); };
  CHECK(ids[static_cast<std::size_t>(at(kEventOpen) + 1)] == vocab.id("lasix"));
  CHECK(at(kEventClose) == at(kEventOpen) + 2);
  CHECK(at(kTimeClose) == at(kTimeOpen) + 3);  // "May 2019"
  CHECK(std::all_of(c.instances[0].segment_ids.begin(), c.instances[0].segment_ids.end(),
                    [](int s) { return s == 0; }));

  // Deterministic and duplicate free.
  CHECK(generate_candidates(doc, vocab).instances == c.instances);
}

TEST_CASE("window, anchors, filters and overflow") {
  const std::string text = "Lasix was given.\nOne.\nTwo.\nThree.\nIt ended in May 2019.\n";
  AnnotatedDocument d = corpus::make_document("w", text);
  d.events.emplace("E0", corpus::span_from_chars(d, "TREATMENT", 0, 5, "E0"));
  const auto t0 = text.find("May 2019");
  d.timexes.emplace("T0", corpus::span_from_chars(d, "DATE", t0, t0 + 8, "T0"));
  REQUIRE(d.tokenized.sentence_tokens.size() == 5);
  const auto vocab = build_relation_vocab({d});

  CHECK(generate_candidates(d, vocab).instances.empty());  // 4 sentences apart
  CandidateOptions wide;
  wide.window = 4;
  CHECK(generate_candidates(d, vocab, wide).instances.size() == 1);

  CandidateOptions anchored;
  anchored.anchor_ids = {"T0"};
  const auto c = generate_candidates(d, vocab, anchored);
  REQUIRE(c.instances.size() == 1);
  const auto& inst = c.instances[0];
  // Two sentences joined by [SEP]; segment 1 starts after the first one.
  CHECK(std::count(inst.token_ids.begin(), inst.token_ids.end(), kSep) == 2);
  const auto sep = std::find(inst.token_ids.begin(), inst.token_ids.end(), kSep) - inst.token_ids.begin();
  CHECK(inst.segment_ids[static_cast<std::size_t>(sep)] == 0);
  CHECK(inst.segment_ids[static_cast<std::size_t>(sep) + 1] == 1);
  CHECK(inst.segment_ids.back() == 1);

  CandidateOptions filtered = anchored;
  filtered.event_tags = {"PROBLEM"};
  CHECK(generate_candidates(d, vocab, filtered).instances.empty());

  CandidateOptions tight = anchored;
  tight.max_len = 8;
  const auto over = generate_candidates(d, vocab, tight);
  CHECK(over.instances.empty());
  CHECK(over.skipped_overflow == 1);
  CHECK(over.warnings.size() == 1);
}

TEST_CASE("timeline fixture pairs the medication with both narrative dates") {
  const auto doc = corpus::timeline_fixture_document();
  const auto vocab = build_relation_vocab({doc});
  CandidateOptions opts;
  opts.event_tags = {"TREATMENT"};
  const auto c = generate_candidates(doc, vocab, opts);
  std::map<std::string, Relation> by_date;
  for (const auto& i : c.instances) {
    if (i.event.surface != "Methotrexate") continue;
    REQUIRE(i.label.has_value());
    by_date[i.time.surface] = *i.label;
  }
  REQUIRE(by_date.count("May 2019"));
  REQUIRE(by_date.count("February 2020"));
  CHECK(by_date["May 2019"] == Relation::Overlap);
  CHECK(by_date["February 2020"] == Relation::Before);
}

TEST_CASE("downsample_balanced on the reported class mix") {
  std::vector<RelationInstance> pool;
  const std::pair<Relation, int> mix[] = {{Relation::Before, 6000}, {Relation::Overlap, 4078}, {Relation::After, 3200}};
  int tag = 100;
  for (const auto& [r, n] : mix) {
    for (int i = 0; i < n; ++i) pool.push_back(labeled_stub(r, tag++));
  }
  const auto a = downsample_balanced(pool, 3000, 9);
  CHECK(a.size() == 9000);
  const auto counts = class_counts(a);
  CHECK(counts[0] == 3000);
  CHECK(counts[1] == 3000);
  CHECK(counts[2] == 3000);
  // Without replacement: no instance twice.
  std::set<std::string> ids;
  for (const auto& i : a) ids.insert(i.doc_id);
  CHECK(ids.size() == 9000);
  CHECK(downsample_balanced(pool, 3000, 9) == a);
  CHECK_FALSE(downsample_balanced(pool, 3000, 10) == a);
  // Shuffled, not grouped by class.
  bool mixed = false;
  for (std::size_t i = 1; i < 30; ++i) mixed |= a[i].label != a[0].label;
  CHECK(mixed);
}

TEST_CASE("downsample_balanced errors and replacement") {
  std::vector<RelationInstance> pool;
  for (int i = 0; i < 10; ++i) pool.push_back(labeled_stub(Relation::After, 10 + i));
  CHECK_THROWS_AS(downsample_balanced(pool, 3000, 1), RangeError);
  for (int i = 0; i < 10; ++i) pool.push_back(labeled_stub(Relation::Before, 30 + i));
  for (int i = 0; i < 10; ++i) pool.push_back(labeled_stub(Relation::Overlap, 50 + i));
  const auto r = downsample_balanced(pool, 25, 1, true);
  CHECK(r.size() == 75);
  CHECK(class_counts(r) == std::array<std::size_t, 3>{25, 25, 25});
  pool.push_back(labeled_stub(Relation::After, 99));
  pool.back().label.reset();
  CHECK_THROWS_AS(downsample_balanced(pool, 5, 1), UsageError);
}

TEST_CASE("instance dump round trip") {
  const auto doc = two_dates_doc();
  const auto vocab = build_relation_vocab({doc});
  const auto c = generate_candidates(doc, vocab).instances;
  const std::string tsv = write_instances(c);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);
  CHECK(read_instances(tsv) == c);
  CHECK_THROWS_AS(read_instances("a\tb\n"), ParseError);
}

TEST_CASE("config validation") {
  RelConfig c = desk_config();
  c.kernel_widths = {2, 2, 4};
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.kernel_widths = {0, 2, 4};
  CHECK_THROWS_AS(c.validate(), UsageError);
  c.kernel_widths = {2, 3, 65};
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = desk_config();
  c.head_dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK_THROWS_AS(build_rel(desk_config(), embed::Vocab()), UsageError);
}

TEST_CASE("classifier outputs a probability simplex with the stated tie order") {
  const auto docs = separable_relation_documents(4, 1);
  const auto vocab = build_relation_vocab(docs);
  RelModel m = build_rel(desk_config(), vocab);
  for (const auto& i : candidates(docs, vocab)) {
    const auto a = classify_relation(m, i);
    double sum = 0.0;
    for (double p : a.probabilities) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
      sum += p;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    const auto b = classify_relation(m, i);
    CHECK(a.probabilities == b.probabilities);
  }
  CHECK(argmax_relation({0.4, 0.4, 0.2}) == Relation::After);
  CHECK(argmax_relation({0.2, 0.4, 0.4}) == Relation::Overlap);
  CHECK(argmax_relation({0.3, 0.3, 0.4}) == Relation::Before);
  CHECK(argmax_relation({1.0 / 3, 1.0 / 3, 1.0 / 3}) == Relation::After);
}

TEST_CASE("separable relation fixture: fit and generalise") {
  const auto train_docs = separable_relation_documents(20, 1);  // 60 instances
  const auto test_docs = separable_relation_documents(20, 2);
  auto all = train_docs;
  all.insert(all.end(), test_docs.begin(), test_docs.end());
  const auto vocab = build_relation_vocab(train_docs);
  const auto train = candidates(train_docs, vocab);
  const auto test = candidates(test_docs, vocab);
  REQUIRE(train.size() == 60);
  CHECK(class_counts(train) == std::array<std::size_t, 3>{20, 20, 20});

  RelModel m = build_rel(desk_config(), vocab);
  const auto h = train_rel(m, train, {});
  REQUIRE_FALSE(h.epochs.empty());
  const double train_acc = evaluate_rel(m, train).second;
  const double test_acc = evaluate_rel(m, test).second;
  MESSAGE("epochs=" << h.epochs.size() << " train=" << train_acc << " held-out=" << test_acc);
  CHECK(train_acc >= 0.98);
  CHECK(test_acc >= 0.90);
  CHECK(h.epochs[h.best_epoch - 1].train_loss <= 0.5 * h.epochs.front().train_loss);

  // Same seed, same model.
  RelModel again = build_rel(desk_config(), vocab);
  CHECK(train_rel(again, train, {}).to_csv() == h.to_csv());
}

TEST_CASE("swapping labels swaps the learned predictions") {
  const auto docs = separable_relation_documents(20, 5);
  const auto vocab = build_relation_vocab(docs);
  auto train = candidates(docs, vocab);
  const RelConfig c = desk_config();
  RelModel base = build_rel(c, vocab);
  train_rel(base, train, {});
  auto swapped = train;
  for (auto& i : swapped) {
    if (*i.label == Relation::After) i.label = Relation::Before;
    else if (*i.label == Relation::Before) i.label = Relation::After;
  }
  RelModel perm = build_rel(c, vocab);
  train_rel(perm, swapped, {});
  std::size_t agree = 0;
  for (const auto& i : train) {
    agree += corpus::invert(classify_relation(base, i).label) == classify_relation(perm, i).label;
  }
  CHECK(static_cast<double>(agree) / static_cast<double>(train.size()) >= 0.95);
}

TEST_CASE("relation checkpoint round trip") {
  const auto docs = separable_relation_documents(3, 8);
  const auto vocab = build_relation_vocab(docs);
  const auto inst = candidates(docs, vocab);
  RelConfig c = desk_config();
  c.epochs = 2;
  RelModel m = build_rel(c, vocab);
  const auto path = (std::filesystem::temp_directory_path() / "medtl_rel_ck.bin").string();
  ner::TrainOptions opts;
  opts.checkpoint_path = path;
  train_rel(m, inst, {}, opts);
  RelModel loaded = load_rel(path);
  CHECK(loaded.vocab.words() == m.vocab.words());
  CHECK(loaded.parameter_count() == m.parameter_count());
  for (const auto& i : inst)
    CHECK(classify_relation(loaded, i).probabilities == classify_relation(m, i).probabilities);
  std::remove(path.c_str());
}
