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

#include <filesystem>

#include "doctest.h"
#include "medtl/error.hpp"
#include "medtl/pipeline.hpp"

using namespace medtl;
using namespace medtl::pipeline;
using corpus::AnnotatedDocument;

namespace {

const char* kTable =
    "ID,Event,Status,Start,Stop\n"
    "134529565,Methotrexate,ON,May 2019,February 2020\n"
    "134529566,Methotrexate,OFF,February 2020,Unknown\n";

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("medtl_test_pipeline_" + name);
  std::filesystem::remove_all(p);
  return p;
}

struct Models {
  ner::NerModel ner;
  relex::RelModel rel;
};

Models small_models(const std::vector<AnnotatedDocument>& docs, std::size_t ner_epochs) {
  const auto& scheme = corpus::TagScheme::i2b2_2009();
  const auto sents = ner::labeled_sentences(docs, scheme);
  ner::NerConfig nc = ner::NerConfig::bilstm_crf();
  nc.word_dim = 16;
  nc.lstm_units = 16;
  nc.dense_units = 16;
  nc.batch_size = 8;
  nc.learning_rate = 0.01;
  nc.max_epochs = ner_epochs;
  nc.patience = ner_epochs + 1;
  nc.seed = 11;
  auto nm = ner::build_ner(nc, ner::build_vocabs(sents, nc), scheme);
  ner::train_ner(nm, sents, {});

  relex::RelConfig rc;
  rc.encoder.hidden = 16;
  rc.encoder.heads = 2;
  rc.encoder.layers = 1;
  rc.encoder.ffn = 32;
  rc.encoder.max_len = 96;
  rc.filters = 8;
  rc.seed = 5;
  return {std::move(nm), relex::build_rel(rc, relex::build_relation_vocab(docs))};
}

}  // namespace

TEST_CASE("gold extraction of the timeline document") {
  ExtractOptions o;
  o.id_base = 134529565;
  const auto ex = extract_gold(std::vector<AnnotatedDocument>{corpus::timeline_fixture_document()}, o);
  CHECK(ex.csv() == kTable);
  const auto recs = ex.records();
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].id == 134529566);
  CHECK(ex.jsonl().find("\"Status\":\"OFF\"") != std::string::npos);
}

TEST_CASE("relations written event to time are inverted") {
  auto doc = corpus::timeline_fixture_document();
  for (auto& l : doc.tlinks) {
    std::swap(l.source, l.target);
    l.relation = corpus::invert(l.relation);
  }
  ExtractOptions o;
  o.id_base = 134529565;
  CHECK(extract_gold(std::vector<AnnotatedDocument>{doc}, o).csv() == kTable);
}

TEST_CASE("repeated mentions merge into one medication") {
  auto doc = corpus::timeline_fixture_document();
  const auto r1 = extract_gold(doc);
  // A second, lowercased mention with no links of its own.
  doc = corpus::make_document("dup", doc.text + "\nmethotrexate was not restarted.\n");
  auto base = corpus::timeline_fixture_document();
  doc.events = base.events;
  doc.timexes = base.timexes;
  doc.tlinks = base.tlinks;
  const auto tail = doc.text.rfind("methotrexate");
  doc.events.emplace("E9", corpus::span_from_chars(doc, "TREATMENT", tail, tail + 12, "E9"));
  const auto r2 = extract_gold(doc);
  CHECK(r2.records == r1.records);
}

TEST_CASE("no entities gives a header-only table") {
  const auto doc = corpus::make_document("empty", "Admission Date: 01/02/2019\n\nNothing to report.\n");
  const auto ex = extract_gold(std::vector<AnnotatedDocument>{doc});
  CHECK(ex.csv() == "ID,Event,Status,Start,Stop\n");
  const auto blank = extract_gold(std::vector<AnnotatedDocument>{corpus::make_document("blank", "")});
  CHECK(blank.csv() == "ID,Event,Status,Start,Stop\n");
}

TEST_CASE("gold extraction over the fixture corpus") {
  const auto docs = corpus::generate_fixture_corpus({12, 4});
  ExtractOptions o;
  const auto a = extract_gold(docs, o);
  o.jobs = 4;
  const auto b = extract_gold(docs, o);
  CHECK(a.csv() == b.csv());
  REQUIRE(a.documents.size() == 12);
  std::size_t n = 0;
  for (const auto& d : a.documents) n += d.records.size();
  CHECK(n >= 12);
  CHECK(a.records().back().id == n);
}

TEST_CASE("corpus directory round trip") {
  const auto docs = corpus::generate_fixture_corpus({5, 2});
  const auto dir = scratch("dir");
  write_corpus_dir(docs, dir.string());
  const auto back = read_corpus_dir(dir.string());
  CHECK(back.warnings == 0);
  REQUIRE(back.docs.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(back.docs[i].doc_id == docs[i].doc_id);
    CHECK(back.docs[i].text == docs[i].text);
    CHECK(back.docs[i].entities == docs[i].entities);
    CHECK(back.docs[i].events == docs[i].events);
    CHECK(back.docs[i].timexes == docs[i].timexes);
    CHECK(back.docs[i].tlinks == docs[i].tlinks);
  }
  CHECK(extract_gold(back.docs).csv() == extract_gold(docs).csv());
  std::filesystem::remove_all(dir);
}

TEST_CASE("missing inputs") {
  CHECK_THROWS_AS(read_corpus_dir("/nonexistent/medtl"), RangeError);
  CHECK_THROWS_AS(read_inputs("/nonexistent/medtl.txt"), RangeError);
  const auto dir = scratch("emptydir");
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(read_corpus_dir(dir.string()), RangeError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("model extraction is parallel-safe and finds the medication") {
  const auto docs = corpus::generate_fixture_corpus({16, 9});
  auto m = small_models(docs, 8);
  const auto meds = predict_medications(m.ner, docs[0]);
  bool found = false;
  for (const auto& s : meds) found = found || s.surface == "Methotrexate";
  CHECK(found);

  ExtractOptions o;
  const auto serial = extract_with_models(docs, m.ner, m.rel, o);
  o.jobs = 4;
  const auto parallel = extract_with_models(docs, m.ner, m.rel, o);
  CHECK(serial.csv() == parallel.csv());
  CHECK(serial.csv().rfind("ID,Event,Status,Start,Stop\n", 0) == 0);
}
