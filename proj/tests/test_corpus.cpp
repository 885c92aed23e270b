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
#include <set>

#include "doctest.h"
#include "medtl/corpus.hpp"
#include "medtl/error.hpp"
#include "medtl/rng.hpp"

using namespace medtl;
using namespace medtl::corpus;

namespace {

const std::string kDoc2009 =
    "Admission Date: 04/28/2019\n"
    "\n"
    "He was given Percocet 1 tab q4h for pain.\n"
    "Dose of Lasix 3.2mg daily.\n";

std::vector<std::string> labels_of(const IobProjection& p, const TagScheme& s, std::size_t sent) {
  std::vector<std::string> out;
  for (int id : p.labels[sent]) out.push_back(s.label(id));
  return out;
}

}  // namespace

TEST_CASE("tag scheme layout") {
  const auto& s = TagScheme::i2b2_2009();
  CHECK(s.size() == 2 * 6 + 2);
  CHECK(s.label(0) == "PAD");
  CHECK(s.label(1) == "O");
  CHECK(s.id("B-m") == 2);
  CHECK(s.id("I-m") == 3);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(s.id(s.label(static_cast<int>(i))) == static_cast<int>(i));
  CHECK_THROWS_AS(s.id("B-zz"), SchemeError);
  CHECK(TagScheme::i2b2_2012().has_tag("TREATMENT"));
}

TEST_CASE("relation names") {
  CHECK(parse_relation("before") == Relation::Before);
  CHECK(!parse_relation("SIMULTANEOUS"));
  CHECK(is_i2b2_relation_name("BEGUN_BY"));
  CHECK(invert(Relation::Before) == Relation::After);
  CHECK(invert(Relation::Overlap) == Relation::Overlap);
}

TEST_CASE("parse 2009 annotations") {
  const std::string ann =
      "m=\"percocet\" 3:3 3:3||do=\"1 tab\" 3:4 3:5||mo=\"nm\"||f=\"q4h\" 3:6 3:6||"
      "du=\"nm\"||r=\"pain\" 3:8 3:8||ln=\"narrative\"\n"
      "m=\"Lasix\" 4:2 4:2||do=\"3.2mg\" 4:3 4:3\n";
  const auto doc = parse_2009_annotations("d1", kDoc2009, ann);
  REQUIRE(doc.entities.size() == 6);
  CHECK(doc.entities[0].tag == "m");
  CHECK(doc.entities[0].surface == "Percocet");
  CHECK(doc.entities[1].tag == "do");
  CHECK(doc.entities[1].surface == "1 tab");
  CHECK(doc.entities[3].surface == "pain");
  CHECK(doc.entities[5].tag == "do");
  CHECK(doc.entities[5].surface == "3.2mg");
  CHECK(doc.warnings.empty());

  const auto& s = TagScheme::i2b2_2009();
  const auto iob = spans_to_iob(doc, s);
  CHECK(labels_of(iob, s, 1) == std::vector<std::string>{"O", "O", "O", "B-m", "B-do", "I-do", "B-f",
                                                         "O", "B-r", "O"});
}

TEST_CASE("parse 2009 errors") {
  CHECK_THROWS_AS(parse_2009_annotations("d", kDoc2009, "zz=\"x\" 3:3 3:3"), SchemeError);
  CHECK_THROWS_AS(parse_2009_annotations("d", kDoc2009, "m=\"x\" 30:3 30:3"), RangeError);
  try {
    parse_2009_annotations("d", kDoc2009, "\nm=\"Lasix\" 4:2\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  const auto lenient = parse_2009_annotations("d", kDoc2009, "m=Lasix\nm=\"Lasix\" 4:2 4:2\n", {true});
  CHECK(lenient.entities.size() == 1);
  CHECK(lenient.warnings.size() == 1);
}

TEST_CASE("parse 2012 annotations") {
  const std::string text = "Levaquin was given on 04/28/2019 for pneumonia.";
  const std::string xml =
      "<TAGS>\n"
      "<EVENT id=\"E1\" start=\"0\" end=\"8\" text=\"Levaquin\" type=\"TREATMENT\" />\n"
      "<EVENT id=\"E2\" start=\"37\" end=\"46\" text=\"pneumonia\" type=\"PROBLEM\" />\n"
      "<TIMEX3 id=\"T1\" start=\"22\" end=\"32\" text=\"04/28/2019\" type=\"DATE\" />\n"
      "</TAGS>\n";
  const std::string links = "TLINK E1 BEFORE T1\nTLINK E2 SIMULTANEOUS T1\nTLINK T1 overlap E2\n";
  const auto doc = parse_2012_annotations("d", text, xml, links);
  CHECK(doc.events.at("E1").tag == "TREATMENT");
  CHECK(doc.events.at("E1").surface == "Levaquin");
  CHECK(doc.timexes.at("T1").surface == "04/28/2019");
  REQUIRE(doc.tlinks.size() == 2);
  CHECK(doc.tlinks[0] == TLink{"E1", "T1", Relation::Before});
  CHECK(doc.tlinks[1] == TLink{"T1", "E2", Relation::Overlap});
  REQUIRE(doc.warnings.size() == 1);
  CHECK(doc.warnings[0].find("dropped 1") != std::string::npos);

  CHECK_THROWS_AS(parse_2012_annotations("d", text, xml, "TLINK E1 BEFORE T9\n"), LinkError);
  CHECK_THROWS_AS(parse_2012_annotations("d", text, xml, "TLINK E1 SOMETIME T1\n"), ParseError);
  const std::string bad = "<EVENT id=\"E1\" start=\"0\" end=\"99\" type=\"TREATMENT\" />";
  CHECK_THROWS_AS(parse_2012_annotations("d", text, bad, ""), RangeError);
  const std::string wrong_type = "<EVENT id=\"E1\" start=\"0\" end=\"8\" type=\"DRUG\" />";
  CHECK_THROWS_AS(parse_2012_annotations("d", text, wrong_type, ""), SchemeError);
}

TEST_CASE("2012 writers round trip") {
  for (const auto& doc : generate_fixture_corpus({5, 3})) {
    const auto back = parse_2012_annotations(doc.doc_id, doc.text, write_2012_xml(doc), write_tlinks(doc));
    CHECK(back.events == doc.events);
    CHECK(back.timexes == doc.timexes);
    CHECK(back.tlinks == doc.tlinks);
    const auto back09 = parse_2009_annotations(doc.doc_id, doc.text, write_2009_annotations(doc));
    CHECK(back09.entities.size() == doc.entities.size());
    for (std::size_t i = 0; i < std::min(back09.entities.size(), doc.entities.size()); ++i) {
      CHECK(back09.entities[i].tag == doc.entities[i].tag);
      CHECK(back09.entities[i].start_token == doc.entities[i].start_token);
      CHECK(back09.entities[i].end_token == doc.entities[i].end_token);
    }
  }
}

TEST_CASE("spans to iob examples") {
  auto doc = make_document("d", "a b c d e");
  const auto& s = TagScheme::i2b2_2009();
  CHECK(labels_of(spans_to_iob(doc, s), s, 0) == std::vector<std::string>(5, "O"));
  doc.entities.push_back(span_from_chars(doc, "m", 4, 7));
  CHECK(labels_of(spans_to_iob(doc, s), s, 0) == std::vector<std::string>{"O", "O", "B-m", "I-m", "O"});

  auto adj = make_document("d", "a b c d e");
  adj.entities.push_back(span_from_chars(adj, "m", 2, 3));
  adj.entities.push_back(span_from_chars(adj, "m", 4, 5));
  CHECK(labels_of(spans_to_iob(adj, s), s, 0) == std::vector<std::string>{"O", "B-m", "B-m", "O", "O"});
}

TEST_CASE("overlaps resolve longest then earliest") {
  auto doc = make_document("d", "a b c d e");
  const auto& s = TagScheme::i2b2_2009();
  doc.entities.push_back(span_from_chars(doc, "do", 2, 3));  // b
  doc.entities.push_back(span_from_chars(doc, "m", 2, 7));   // b c d
  doc.entities.push_back(span_from_chars(doc, "f", 6, 9));   // d e
  const auto p = spans_to_iob(doc, s);
  CHECK(p.dropped_overlaps == 2);
  CHECK(labels_of(p, s, 0) == std::vector<std::string>{"O", "B-m", "I-m", "I-m", "O"});

  auto tie = make_document("d", "a b c d e");
  tie.entities.push_back(span_from_chars(tie, "f", 4, 7));  // c d
  tie.entities.push_back(span_from_chars(tie, "m", 2, 5));  // b c
  const auto q = spans_to_iob(tie, s);
  CHECK(q.dropped_overlaps == 1);
  CHECK(labels_of(q, s, 0) == std::vector<std::string>{"O", "B-m", "I-m", "O", "O"});
}

TEST_CASE("cross sentence span restarts at B") {
  auto doc = make_document("d", "Take aspirin. Daily dose.");
  const auto& s = TagScheme::i2b2_2009();
  REQUIRE(doc.tokenized.sentences.size() == 2);
  doc.entities.push_back(span_from_chars(doc, "f", 5, 19));  // aspirin . Daily
  const auto p = spans_to_iob(doc, s);
  CHECK(p.cross_sentence == 1);
  CHECK(labels_of(p, s, 0) == std::vector<std::string>{"O", "B-f", "I-f"});
  CHECK(labels_of(p, s, 1) == std::vector<std::string>{"B-f", "O", "O"});
}

TEST_CASE("iob to spans examples") {
  const std::vector<std::string> toks = {"w0", "w1", "w2", "w3"};
  auto spans = iob_to_spans(toks, {"B-m", "I-m", "O", "B-do"});
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].tag == "m");
  CHECK(spans[0].start_token == 0);
  CHECK(spans[0].end_token == 1);
  CHECK(spans[0].surface == "w0 w1");
  CHECK(spans[1].tag == "do");
  CHECK(spans[1].start_token == 3);

  spans = iob_to_spans({"a", "b"}, {"I-m", "O"});
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].start_token == 0);

  spans = iob_to_spans({"a", "b"}, {"B-m", "I-do"});
  REQUIRE(spans.size() == 2);
  CHECK(spans[1].tag == "do");
  CHECK(spans[1].start_token == 1);

  spans = iob_to_spans({"a", "b", "c"}, {"B-m", "PAD", "I-m"});
  CHECK(spans.size() == 2);
}

TEST_CASE("split corpus sizes and determinism") {
  auto s = split_corpus(20, 5);
  CHECK(s.train.size() == 14);
  CHECK(s.val.size() == 3);
  CHECK(s.test.size() == 3);
  auto t = split_corpus(3, 5);
  CHECK(t.train.size() == 1);
  CHECK(t.val.size() == 1);
  CHECK(t.test.size() == 1);
  auto again = split_corpus(20, 5);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);
  std::set<std::size_t> all(s.train.begin(), s.train.end());
  all.insert(s.val.begin(), s.val.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 20);
  CHECK_THROWS_AS(split_corpus(2, 1), UsageError);
}

TEST_CASE("conll write and read") {
  CHECK(write_conll_sentences({{{"CT"}, {"O"}}}) == "CT\tO\n\n");
  std::vector<ConllDocument> docs;
  const auto& s = TagScheme::i2b2_2009();
  for (const auto& d : generate_fixture_corpus({4, 9})) docs.push_back(to_conll(d, s));
  const auto back = read_conll(write_conll(docs));
  CHECK(back == docs);
  try {
    read_conll("CT\tO\na b c\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("fixture corpus is valid and deterministic") {
  const auto a = generate_fixture_corpus({10, 1});
  const auto b = generate_fixture_corpus({10, 1});
  REQUIRE(a.size() == 10);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(write_2012_xml(a[i]) == write_2012_xml(b[i]));
    CHECK(a[i].warnings.empty());
    for (const auto& l : a[i].tlinks) {
      CHECK((a[i].events.count(l.source) || a[i].timexes.count(l.source)));
      CHECK((a[i].events.count(l.target) || a[i].timexes.count(l.target)));
    }
    const auto p = spans_to_iob(a[i], TagScheme::i2b2_2009());
    CHECK(p.dropped_overlaps == 0);
    CHECK(p.cross_sentence == 0);
  }
}

TEST_CASE("timeline fixture") {
  const auto doc = timeline_fixture_document();
  CHECK(doc.text.find("Methotrexate 15mg weekly in May 2019") != std::string::npos);
  std::string med_id;
  for (const auto& [id, e] : doc.events) {
    if (e.surface == "Methotrexate") med_id = id;
  }
  REQUIRE(!med_id.empty());
  auto rel_with = [&](const std::string& surface) -> std::optional<Relation> {
    for (const auto& l : doc.tlinks) {
      if (l.target == med_id && doc.timexes.count(l.source) && doc.timexes.at(l.source).surface == surface)
        return l.relation;
    }
    return std::nullopt;
  };
  CHECK(rel_with("04/28/2019") == Relation::Overlap);
  CHECK(rel_with("May 2019") == Relation::Overlap);
  CHECK(rel_with("February 2020") == Relation::Before);
  CHECK(rel_with("03/02/2020") == Relation::Before);
}

TEST_CASE("separable fixture maps words to labels") {
  const auto sents = separable_ner_fixture(50, 3);
  REQUIRE(sents.size() == 50);
  std::map<std::string, std::set<std::string>> seen;
  for (const auto& s : sents) {
    REQUIRE(s.tokens.size() == s.labels.size());
    for (std::size_t i = 0; i < s.tokens.size(); ++i) seen[s.tokens[i]].insert(s.labels[i]);
  }
  std::size_t inside = 0;
  for (const auto& [w, ls] : seen) {
    CHECK(ls.size() == 1);
    inside += ls.begin()->rfind("I-", 0) == 0;
  }
  CHECK(inside > 0);
}
