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
#include <array>
#include <cstdio>
#include <tuple>

#include "medtl/corpus.hpp"
#include "medtl/rng.hpp"

namespace medtl::corpus {

namespace {

// Fixture text is ASCII, so byte offsets equal code point offsets.
class DocBuilder {
 public:
  enum class Kind { Med2009, Event, Timex };

  void add(std::string_view s) { text_ += s; }

  void mark(Kind kind, std::string tag, std::string_view s, std::string id = {}) {
    pending_.push_back({kind, std::move(tag), std::move(id), text_.size(), text_.size() + s.size()});
    text_ += s;
  }

  // Marks the same stretch of text under two annotation layers.
  void mark2(std::string tag2009, std::string event_tag, std::string_view s, std::string id) {
    pending_.push_back({Kind::Med2009, std::move(tag2009), {}, text_.size(), text_.size() + s.size()});
    mark(Kind::Event, std::move(event_tag), s, std::move(id));
  }

  void link(std::string from, Relation r, std::string to) {
    links_.push_back({std::move(from), std::move(to), r});
  }

  AnnotatedDocument build(std::string doc_id) const {
    AnnotatedDocument doc = make_document(std::move(doc_id), text_);
    for (const auto& p : pending_) {
      auto span = span_from_chars(doc, p.tag, p.begin, p.end, p.id);
      switch (p.kind) {
        case Kind::Med2009: doc.entities.push_back(std::move(span)); break;
        case Kind::Event: doc.events.emplace(p.id, std::move(span)); break;
        case Kind::Timex: doc.timexes.emplace(p.id, std::move(span)); break;
      }
    }
    std::stable_sort(doc.entities.begin(), doc.entities.end(),
                     [](const EntitySpan& a, const EntitySpan& b) {
                       return std::tie(a.start_token, a.end_token) <
                              std::tie(b.start_token, b.end_token);
                     });
    doc.tlinks = links_;
    return doc;
  }

 private:
  struct Pending {
    Kind kind;
    std::string tag;
    std::string id;
    std::size_t begin, end;
  };
  std::string text_;
  std::vector<Pending> pending_;
  std::vector<TLink> links_;
};

constexpr std::array<const char*, 12> kMonths = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

struct Date {
  int year, month, day;
};

std::string numeric_date(const Date& d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%02d/%02d/%04d", d.month, d.day, d.year);
  return buf;
}

std::string month_year(const Date& d) {
  return std::string(kMonths[static_cast<std::size_t>(d.month - 1)]) + " " + std::to_string(d.year);
}

std::string month_day_year(const Date& d) {
  return std::string(kMonths[static_cast<std::size_t>(d.month - 1)]) + " " + std::to_string(d.day) +
         ", " + std::to_string(d.year);
}

Date add_days(Date d, int days) {
  // 28-day months keep the arithmetic trivial; fixture dates stay valid.
  int serial = (d.year * 12 + d.month - 1) * 28 + d.day - 1 + days;
  d.day = serial % 28 + 1;
  serial /= 28;
  d.month = serial % 12 + 1;
  d.year = serial / 12;
  return d;
}

template <std::size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& a) {
  return a[rng.below(N)];
}

void add_header(DocBuilder& b, const Date& adm, const Date& dis) {
  b.add("Admission Date: ");
  b.mark(DocBuilder::Kind::Timex, "DATE", numeric_date(adm), "T0");
  b.add("\n\nDischarge Date: ");
  b.mark(DocBuilder::Kind::Timex, "DATE", numeric_date(dis), "T1");
  b.add("\n\nHOSPITAL COURSE:\n\n");
}

AnnotatedDocument random_document(std::string id, Rng& rng) {
  static constexpr std::array<const char*, 10> meds = {
      "Lisinopril", "Metformin", "Warfarin",   "Heparin",  "Aspirin",
      "Levaquin",   "Percocet",  "Prednisone", "Lasix",    "Coumadin"};
  static constexpr std::array<const char*, 6> doses = {"10mg", "20mg", "5mg", "3.2mg", "40mg", "81mg"};
  static constexpr std::array<const char*, 4> freqs = {"daily", "twice a day", "weekly", "nightly"};
  static constexpr std::array<const char*, 3> routes = {"p.o.", "IV", "orally"};
  static constexpr std::array<const char*, 5> reasons = {"hypertension", "dizziness",
                                                         "chest pain", "infection", "fever"};
  static constexpr std::array<const char*, 3> durations = {"10-day course", "two weeks",
                                                           "one month"};
  static constexpr std::array<const char*, 4> tests = {"CT", "MRI", "chest x-ray", "ECG"};
  static constexpr std::array<const char*, 3> depts = {"emergency room", "intensive care unit",
                                                       "cardiology clinic"};

  DocBuilder b;
  const Date adm{2015 + static_cast<int>(rng.below(6)), 1 + static_cast<int>(rng.below(12)),
                 1 + static_cast<int>(rng.below(28))};
  const Date dis = add_days(adm, 3 + static_cast<int>(rng.below(40)));
  add_header(b, adm, dis);

  int next_event = 0, next_timex = 2;
  auto eid = [&] { return "E" + std::to_string(next_event++); };
  auto tid = [&] { return "T" + std::to_string(next_timex++); };

  const std::size_t n_meds = 1 + rng.below(3);
  for (std::size_t i = 0; i < n_meds; ++i) {
    const std::string med_id = eid();
    const Date start = add_days(adm, -static_cast<int>(rng.below(400)) - 1);
    const bool stopped = rng.below(2) == 0;

    b.add(rng.below(2) ? "He was started on " : "The patient was given ");
    b.mark2("m", "TREATMENT", meds[rng.below(meds.size())], med_id);
    b.add(" ");
    b.mark(DocBuilder::Kind::Med2009, "do", pick(rng, doses));
    b.add(" ");
    b.mark(DocBuilder::Kind::Med2009, "mo", pick(rng, routes));
    b.add(" ");
    b.mark(DocBuilder::Kind::Med2009, "f", pick(rng, freqs));
    b.add(" in ");
    const std::string start_id = tid();
    b.mark(DocBuilder::Kind::Timex, "DATE", rng.below(2) ? month_year(start) : month_day_year(start),
           start_id);
    if (rng.below(2)) {
      b.add(" for a ");
      b.mark(DocBuilder::Kind::Med2009, "du", pick(rng, durations));
    }
    b.add(" for ");
    b.mark2("r", "PROBLEM", pick(rng, reasons), eid());
    b.add(". ");

    b.link(start_id, Relation::Overlap, med_id);
    b.link("T0", Relation::After, med_id);
    if (stopped) {
      const Date stop = add_days(adm, 1 + static_cast<int>(rng.below(2)));
      const std::string stop_id = tid();
      b.add("It was ");
      b.mark(DocBuilder::Kind::Event, "OCCURRENCE", "discontinued", eid());
      b.add(" on ");
      b.mark(DocBuilder::Kind::Timex, "DATE", month_day_year(stop), stop_id);
      b.add(". ");
      b.link(stop_id, Relation::Before, med_id);
      b.link("T1", Relation::After, med_id);
    } else {
      b.link("T1", Relation::Before, med_id);
    }
    b.add("\n\n");
  }

  // Non-medication events.
  b.add("A ");
  const std::string test_id = eid();
  b.mark(DocBuilder::Kind::Event, "TEST", pick(rng, tests), test_id);
  b.add(" was performed on ");
  const std::string test_date = tid();
  b.mark(DocBuilder::Kind::Timex, "DATE", numeric_date(add_days(adm, 1)), test_date);
  b.add(". It ");
  b.mark(DocBuilder::Kind::Event, "EVIDENTIAL", "shows", eid());
  b.add(" a small mass. He was ");
  const std::string occ = eid();
  b.mark(DocBuilder::Kind::Event, "OCCURRENCE", "transferred", occ);
  b.add(" to the ");
  b.mark(DocBuilder::Kind::Event, "CLINICAL_DEPT", pick(rng, depts), eid());
  b.add(".\n");
  b.link(test_date, Relation::Overlap, test_id);
  b.link("T1", Relation::After, occ);

  return b.build(std::move(id));
}

void build_timeline(DocBuilder& b) {
  add_header(b, Date{2019, 4, 28}, Date{2020, 3, 2});
  b.add("He was started on ");
  b.mark2("m", "TREATMENT", "Methotrexate", "E0");
  b.add(" ");
  b.mark(DocBuilder::Kind::Med2009, "do", "15mg");
  b.add(" ");
  b.mark(DocBuilder::Kind::Med2009, "f", "weekly");
  b.add(" in ");
  b.mark(DocBuilder::Kind::Timex, "DATE", "May 2019", "T2");
  b.add(", which was continued until ");
  b.mark(DocBuilder::Kind::Timex, "DATE", "February 2020", "T3");
  b.add(" when it was stopped because of ");
  b.mark2("r", "PROBLEM", "liver toxicity", "E1");
  b.add(".\n");
  // Links point from the date to the medication.
  b.link("T0", Relation::Overlap, "E0");
  b.link("T2", Relation::Overlap, "E0");
  b.link("T3", Relation::Before, "E0");
  b.link("T1", Relation::Before, "E0");
}

}  // namespace

AnnotatedDocument timeline_fixture_document() {
  DocBuilder b;
  build_timeline(b);
  return b.build("timeline");
}

std::vector<AnnotatedDocument> generate_fixture_corpus(const FixtureSpec& spec) {
  std::vector<AnnotatedDocument> docs;
  Rng rng(spec.seed);
  char id[32];
  for (std::size_t i = 0; i < spec.n_docs; ++i) {
    std::snprintf(id, sizeof id, "doc_%03zu", i);
    if (i == 0) {
      DocBuilder b;
      build_timeline(b);
      docs.push_back(b.build(id));
    } else {
      docs.push_back(random_document(id, rng));
    }
  }
  return docs;
}

std::vector<LabeledSentence> separable_ner_fixture(std::size_t n_sentences, std::uint64_t seed) {
  static constexpr std::array<const char*, 5> med = {"aspirin", "lisinopril", "metformin",
                                                     "warfarin", "heparin"};
  static constexpr std::array<const char*, 4> dose = {"10mg", "20mg", "5mg", "40mg"};
  static constexpr std::array<const char*, 3> freq = {"daily", "nightly", "weekly"};
  static constexpr std::array<const char*, 3> mode = {"oral", "iv", "topical"};
  static constexpr std::array<const char*, 3> dur_b = {"ten", "five", "seven"};
  static constexpr std::array<const char*, 2> dur_i = {"days", "weeks"};
  static constexpr std::array<const char*, 3> rsn_b = {"chest", "abdominal", "back"};
  static constexpr std::array<const char*, 3> rsn_i = {"pain", "ache", "discomfort"};
  static constexpr std::array<const char*, 10> outside = {"the", "patient", "was", "given", "for",
                                                          "and", "with", "he", "took", "then"};

  Rng rng(seed);
  std::vector<LabeledSentence> out;
  for (std::size_t s = 0; s < n_sentences; ++s) {
    LabeledSentence ls;
    auto o = [&] {
      ls.tokens.push_back(pick(rng, outside));
      ls.labels.push_back("O");
    };
    auto one = [&](const char* w, const char* tag) {
      ls.tokens.push_back(w);
      ls.labels.push_back(std::string("B-") + tag);
    };
    auto two = [&](const char* b, const char* i, const char* tag) {
      one(b, tag);
      ls.tokens.push_back(i);
      ls.labels.push_back(std::string("I-") + tag);
    };
    const std::size_t parts = 2 + rng.below(3);
    for (std::size_t p = 0; p < parts; ++p) {
      o();
      if (rng.below(2)) o();
      switch (rng.below(6)) {
        case 0: one(pick(rng, med), "m"); break;
        case 1: one(pick(rng, dose), "do"); break;
        case 2: one(pick(rng, freq), "f"); break;
        case 3: one(pick(rng, mode), "mo"); break;
        case 4: two(pick(rng, dur_b), pick(rng, dur_i), "du"); break;
        default: two(pick(rng, rsn_b), pick(rng, rsn_i), "r"); break;
      }
    }
    o();
    out.push_back(std::move(ls));
  }
  return out;
}

}  // namespace medtl::corpus
