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

#include <optional>
#include <regex>

#include "doctest.h"
#include "medtl/corpus.hpp"
#include "medtl/error.hpp"
#include "medtl/medstatus.hpp"
#include "medtl/rng.hpp"

using namespace medtl;
using namespace medtl::medstatus;
using corpus::AnnotatedDocument;
using corpus::EntitySpan;

namespace {

const char* kTimelineText =
    "Admission Date: 01/10/2019\n\nDischarge Date: 03/20/2019\n\n"
    "He had taken Lasix since December 2018 and on February 14, 2019 it was held.\n";

struct Scenario {
  AnnotatedDocument doc;
  AnchorDates anchors;
  EntitySpan adm, dis, mid, early;
};

Scenario scenario() {
  Scenario s;
  s.doc = corpus::make_document("s", kTimelineText);
  const auto dates = find_dates(s.doc);
  REQUIRE(dates.size() == 4);
  s.adm = dates[0];
  s.dis = dates[1];
  s.early = dates[2];  // December 2018, before admission
  s.mid = dates[3];    // February 14, 2019, between the anchors
  s.anchors = find_anchor_dates(s.doc, dates);
  REQUIRE(s.anchors.admission);
  REQUIRE(s.anchors.discharge);
  return s;
}

// Rule text, written out independently of the library.
bool rule_oracle(Relation adm, Relation dis, std::optional<Relation> intermediate) {
  const bool dis_before_or_overlap = dis == Relation::Before || dis == Relation::Overlap;
  if (adm == Relation::After && dis_before_or_overlap) return true;
  if (adm == Relation::Overlap && dis == Relation::Overlap) return true;
  if (intermediate == Relation::Overlap && dis_before_or_overlap) return true;
  return false;
}

}  // namespace

TEST_CASE("normalize_date patterns") {
  CHECK(normalize_date("May 2019") == "2019-05");
  CHECK(normalize_date("04/12/2019") == "2019-04-12");
  CHECK(normalize_date("2019-04-12") == "2019-04-12");
  CHECK(normalize_date("February 14, 2019") == "2019-02-14");
  CHECK(normalize_date("Feb. 14 2019") == "2019-02-14");
  CHECK(normalize_date("Sept 2020") == "2020-09");
  CHECK(normalize_date("  February 2020 ") == "2020-02");
  CHECK_FALSE(normalize_date("last Tuesday"));
  CHECK_FALSE(normalize_date("02/30/2019"));
  CHECK_FALSE(normalize_date("13/01/2019"));
  CHECK(normalize_date("02/29/2020") == "2020-02-29");
  CHECK_FALSE(normalize_date("02/29/2019"));
  CHECK_FALSE(normalize_date(""));
  CHECK_FALSE(normalize_date("May"));
}

TEST_CASE("normalize_date output shape on random input") {
  const std::regex shape("^\\d{4}-\\d{2}(-\\d{2})?$");
  const std::string alphabet = "0123456789/-, MayJunFebruary.";
  Rng rng(17);
  for (int i = 0; i < 3000; ++i) {
    std::string s;
    const std::size_t n = rng.below(16);
    for (std::size_t k = 0; k < n; ++k) s += alphabet[rng.below(alphabet.size())];
    std::optional<std::string> r;
    CHECK_NOTHROW(r = normalize_date(s));
    if (r) CHECK(std::regex_match(*r, shape));
  }
}

TEST_CASE("compare_dates") {
  CHECK(compare_dates("2019-05", "2019-04-28") == 1);
  CHECK(compare_dates("2019-04-28", "2020-03-02") == -1);
  CHECK(compare_dates("2019-04", "2019-04-28") == std::nullopt);
  CHECK(compare_dates("2019-04-28", "2019-04-28") == 0);
}

TEST_CASE("find_dates over text") {
  const auto doc = corpus::make_document("d", "Seen 04/12/2019 and on May 3, 2019; follow up June 2019. Code 12345/6/7890x.\n");
  const auto d = find_dates(doc);
  REQUIRE(d.size() == 3);
  CHECK(d[0].surface == "04/12/2019");
  CHECK(d[1].surface == "May 3, 2019");
  CHECK(d[2].surface == "June 2019");
  CHECK(d[0].tag == "DATE");
}

TEST_CASE("anchor dates") {
  SUBCASE("direct header") {
    const auto doc = corpus::make_document("a", "Admission Date: 04/12/2019\n\nHe was well.\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    REQUIRE(a.admission);
    CHECK(a.admission->span.surface == "04/12/2019");
    CHECK(a.admission->normalized == "2019-04-12");
    CHECK_FALSE(a.discharge);
    CHECK(a.warnings.empty());
  }
  SUBCASE("no headers") {
    const auto doc = corpus::make_document("a", "He was seen on 04/12/2019.\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    CHECK_FALSE(a.admission);
    CHECK_FALSE(a.discharge);
  }
  SUBCASE("case and missing colon") {
    const auto doc = corpus::make_document("a", "ADMISSION DATE 04/12/2019\ndischarge date: 04/20/2019\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    REQUIRE(a.admission);
    REQUIRE(a.discharge);
    CHECK(a.discharge->span.surface == "04/20/2019");
  }
  SUBCASE("first of two admission headers wins") {
    const auto doc = corpus::make_document(
        "a", "Admission Date: 04/12/2019\n\nAdmission Date: 05/01/2019\n\nDischarge Date: 05/09/2019\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    REQUIRE(a.admission);
    CHECK(a.admission->span.surface == "04/12/2019");
    CHECK(a.warnings.size() == 1);
  }
  SUBCASE("admission after discharge keeps both and warns") {
    const auto doc = corpus::make_document("a", "Admission Date: 06/12/2019\n\nDischarge Date: 05/09/2019\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    CHECK(a.admission);
    CHECK(a.discharge);
    CHECK(a.warnings.size() == 1);
  }
  SUBCASE("header without a date") {
    const auto doc = corpus::make_document("a", "Discharge Date:\n\nAdmission Date: 06/12/2019\n");
    const auto a = find_anchor_dates(doc, find_dates(doc));
    CHECK(a.admission);
    CHECK_FALSE(a.discharge);
    CHECK(a.warnings.size() == 1);
  }
}

TEST_CASE("quoted rule cases") {
  const auto s = scenario();
  auto decide = [&](Relation adm, Relation dis) {
    return medication_status({{s.adm, adm}, {s.dis, dis}}, s.anchors);
  };
  CHECK(decide(Relation::After, Relation::Before).status == Status::InUse);
  CHECK(decide(Relation::After, Relation::Before).rule == 1);
  CHECK(decide(Relation::Overlap, Relation::Overlap).status == Status::InUse);
  CHECK(decide(Relation::Overlap, Relation::Overlap).rule == 2);
  CHECK(decide(Relation::Before, Relation::After).status == Status::NotInUse);
  CHECK(decide(Relation::Before, Relation::After).rule == 4);
  CHECK_FALSE(decide(Relation::Before, Relation::After).insufficient_anchor);
}

TEST_CASE("exhaustive rule truth table") {
  const auto s = scenario();
  const Relation all[] = {Relation::Before, Relation::After, Relation::Overlap};
  std::size_t cases = 0;
  for (Relation adm : all) {
    for (Relation dis : all) {
      std::vector<std::optional<Relation>> mids = {std::nullopt, Relation::Before, Relation::After, Relation::Overlap};
      for (const auto& mid : mids) {
        std::vector<DatedRelation> rels = {{s.adm, adm}, {s.dis, dis}};
        if (mid) rels.push_back({s.mid, *mid});
        const auto d = medication_status(rels, s.anchors);
        CAPTURE(corpus::relation_name(adm));
        CAPTURE(corpus::relation_name(dis));
        CAPTURE((mid ? corpus::relation_name(*mid) : "none"));
        CHECK((d.status == Status::InUse) == rule_oracle(adm, dis, mid));
        ++cases;
      }
    }
  }
  CHECK(cases == 36);
}

TEST_CASE("rule 3 needs the date strictly between the anchors") {
  const auto s = scenario();
  const auto d = medication_status({{s.adm, Relation::Before}, {s.dis, Relation::Before}, {s.early, Relation::Overlap}},
                                   s.anchors);
  CHECK(d.status == Status::NotInUse);
  // An anchor is never an intermediate date.
  const auto e = medication_status({{s.dis, Relation::Overlap}, {s.adm, Relation::Before}}, s.anchors);
  CHECK(e.status == Status::NotInUse);
}

TEST_CASE("rule 3 falls back to text position") {
  const auto doc = corpus::make_document(
      "f", "Admission Date: 01/10/2019\n\nLasix was given last week.\n\nDischarge Date: 03/20/2019\n");
  const auto dates = find_dates(doc);
  const auto anchors = find_anchor_dates(doc, dates);
  EntitySpan vague = corpus::span_from_chars(doc, "DATE", 43, 52, "X");
  REQUIRE(vague.surface == "last week");
  const auto d = medication_status(
      {{anchors.admission->span, Relation::Before}, {anchors.discharge->span, Relation::Before}, {vague, Relation::Overlap}},
      anchors);
  CHECK(d.status == Status::InUse);
  CHECK(d.rule == 3);
  CHECK(d.textual_fallback);
}

TEST_CASE("missing anchors flag the decision") {
  const auto s = scenario();
  AnchorDates none;
  auto d = medication_status({{s.adm, Relation::After}, {s.dis, Relation::Before}}, none);
  CHECK(d.status == Status::NotInUse);
  CHECK(d.insufficient_anchor);
  d = medication_status({{s.adm, Relation::After}}, s.anchors);  // rel(discharge) unknown
  CHECK(d.status == Status::NotInUse);
  CHECK(d.insufficient_anchor);
}

TEST_CASE("records for the timeline fixture") {
  const auto doc = corpus::timeline_fixture_document();
  std::vector<EntitySpan> dates;
  for (const auto& [id, t] : doc.timexes) dates.push_back(t);
  const auto anchors = find_anchor_dates(doc, dates);
  REQUIRE(anchors.admission);
  REQUIRE(anchors.discharge);
  std::vector<DatedRelation> rels;
  for (const auto& l : doc.tlinks) rels.push_back({doc.timexes.at(l.source), l.relation});
  const auto decision = medication_status(rels, anchors);
  CHECK(decision.status == Status::InUse);
  CHECK(decision.rule == 3);
  const auto recs = derive_records("Methotrexate", rels, anchors, decision);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0] == MedStatusRecord{0, "Methotrexate", Status::InUse, "May 2019", "February 2020"});
  CHECK(recs[1] == MedStatusRecord{0, "Methotrexate", Status::NotInUse, "February 2020", "Unknown"});
  CHECK(emit_table(recs, 134529565) ==
        "ID,Event,Status,Start,Stop\n"
        "134529565,Methotrexate,ON,May 2019,February 2020\n"
        "134529566,Methotrexate,OFF,February 2020,Unknown\n");
}

TEST_CASE("records without a stop or in the OFF state") {
  const auto s = scenario();
  auto recs = derive_records("Lasix", {{s.adm, Relation::After}, {s.dis, Relation::Before}, {s.early, Relation::Overlap}},
                             s.anchors, {Status::InUse, 1, false, false});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].start == "December 2018");
  CHECK(recs[0].stop == "Unknown");

  recs = derive_records("Lasix", {{s.adm, Relation::Overlap}, {s.dis, Relation::Overlap}}, s.anchors,
                        {Status::InUse, 2, false, false});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].start == s.adm.surface);

  recs = derive_records("Lasix", {{s.mid, Relation::Before}}, s.anchors, {Status::NotInUse, 4, true, false});
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].status == Status::NotInUse);
  CHECK(recs[0].start == "February 14, 2019");
  CHECK(recs[0].stop == "Unknown");
}

TEST_CASE("CSV emission and round trip") {
  CHECK(emit_table({}, 1) == "ID,Event,Status,Start,Stop\n");
  std::vector<MedStatusRecord> recs = {
      {0, "Tylenol, extra strength", Status::InUse, "May 2019", "Unknown"},
      {0, "say \"when\"", Status::NotInUse, "Unknown", "Unknown"},
      {0, "two\nlines", Status::InUse, "June 2019", "July 2019"},
  };
  const std::string csv = emit_table(recs, 7);
  CHECK(csv.find("\"Tylenol, extra strength\"") != std::string::npos);
  CHECK(csv.find("\"say \"\"when\"\"\"") != std::string::npos);
  const auto back = parse_table(csv);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto want = recs[i];
    want.id = 7 + i;
    CHECK(back[i] == want);
  }
  CHECK(emit_table(back, 7) == csv);
  CHECK(parse_table("ID,Event,Status,Start,Stop\r\n1,a,ON,b,c\r\n").size() == 1);
  CHECK_THROWS_AS(parse_table("ID,Event\n"), ParseError);
  CHECK_THROWS_AS(parse_table("ID,Event,Status,Start,Stop\n1,a,MAYBE,b,c\n"), ParseError);
  CHECK_THROWS_AS(parse_table("ID,Event,Status,Start,Stop\n1,\"a,ON,b,c\n"), ParseError);
}

TEST_CASE("JSON lines mirror the CSV fields") {
  const std::vector<MedStatusRecord> recs = {{0, "Methotrexate", Status::InUse, "May 2019", "February 2020"}};
  CHECK(emit_jsonl(recs, 5) ==
        "{\"ID\":5,\"Event\":\"Methotrexate\",\"Status\":\"ON\",\"Start\":\"May 2019\",\"Stop\":\"February 2020\"}\n");
  CHECK(emit_jsonl({}, 5).empty());
}
