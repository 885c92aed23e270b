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

#include <set>
#include <stdexcept>

#include "doctest.h"
#include "medtl/rng.hpp"
#include "medtl/textproc.hpp"

using namespace medtl::text;

namespace {

std::vector<std::string> texts(const std::vector<Token>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

std::string slice(std::string_view doc, const Token& t) {
  const auto u = utf8_decode(doc);
  return utf8_encode(std::u32string_view(u).substr(t.start, t.end - t.start));
}

}  // namespace

TEST_CASE("sentences split at terminator plus capital") {
  const auto r = segment_sentences(std::string_view("He was readmitted. CT shows mass."));
  REQUIRE(r.size() == 2);
  CHECK(r[0] == CharRange{0, 18});
  CHECK(r[1] == CharRange{19, 33});
}

TEST_CASE("empty text has no sentences") {
  CHECK(segment_sentences(std::string_view("")).empty());
  CHECK(segment_sentences(std::string_view("   \n\t ")).empty());
}

TEST_CASE("abbreviations never split") {
  CHECK(segment_sentences(std::string_view("Take 40mg p.o. daily.")).size() == 1);
  CHECK(segment_sentences(std::string_view("Seen by Dr. Smith today. Stable.")).size() == 2);
  CHECK(segment_sentences(std::string_view("Aspirin q.d. Continue at home.")).size() == 1);
}

TEST_CASE("lowercase after a period does not split") {
  CHECK(segment_sentences(std::string_view("Dose was 5 mg. then increased.")).size() == 1);
  CHECK(segment_sentences(std::string_view("Stable! 2 days later discharged?")).size() == 2);
}

TEST_CASE("custom abbreviation list") {
  const auto abbr = AbbreviationList::parse("# comment\nvs.\n\nApprox.\n");
  CHECK(abbr.size() == 2);
  CHECK(abbr.contains("approx."));
  CHECK(segment_sentences(std::string_view("BP 120/80 vs. Prior 130/90."), abbr).size() == 1);
  CHECK(segment_sentences(std::string_view("BP 120/80 vs. Prior 130/90."), AbbreviationList{}).size() == 2);
}

TEST_CASE("tokenize examples") {
  CHECK(texts(tokenize("CT shows mass.", 0)) == std::vector<std::string>{"CT", "shows", "mass", "."});
  CHECK(texts(tokenize("Methotrexate,", 0)) == std::vector<std::string>{"Methotrexate", ","});
  CHECK(texts(tokenize("(May 2019)", 0)) == std::vector<std::string>{"(", "May", "2019", ")"});
  CHECK(texts(tokenize("40mg,", 0)) == std::vector<std::string>{"40mg", ","});
  CHECK(texts(tokenize("Take 40mg p.o. daily.", 0)) ==
        std::vector<std::string>{"Take", "40mg", "p.o.", "daily", "."});
  CHECK(texts(tokenize("04/28/2019 3.2mg", 0)) == std::vector<std::string>{"04/28/2019", "3.2mg"});
}

TEST_CASE("token offsets honour base offset") {
  const auto toks = tokenize("ab, c", 10);
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].start == 10);
  CHECK(toks[0].end == 12);
  CHECK(toks[1].start == 12);
  CHECK(toks[2].start == 14);
}

TEST_CASE("document offsets reconstruct non-whitespace content") {
  const std::string doc =
      "Admission Date: 04/28/2019\n\nHe was started on Methotrexate (15mg) weekly. "
      "Dr. Smith saw him; caf\xC3\xA9 au lait spots. Naïve response!";
  const auto td = tokenize_document(doc);
  std::string rebuilt;
  for (const auto& t : td.tokens) {
    CHECK(t.start < t.end);
    CHECK(slice(doc, t) == t.text);
    rebuilt += t.text;
  }
  std::string compact;
  for (char32_t c : utf8_decode(doc)) {
    if (c != ' ' && c != '\n' && c != '\t') compact += utf8_encode(c);
  }
  CHECK(rebuilt == compact);
  for (std::size_t s = 0; s < td.sentence_tokens.size(); ++s) {
    for (auto i = td.sentence_tokens[s].first; i < td.sentence_tokens[s].second; ++i)
      CHECK(td.tokens[i].sentence_index == s);
  }
  for (std::size_t i = 1; i < td.tokens.size(); ++i) CHECK(td.tokens[i - 1].end <= td.tokens[i].start);
}

TEST_CASE("tokenization is idempotent on plain tokens") {
  for (const char* w : {"Methotrexate", "40mg", "p.o.", "04/28/2019", "x-ray", ","}) {
    const auto once = tokenize(w, 0);
    REQUIRE(once.size() == 1);
    CHECK(texts(tokenize(once[0].text, 0)) == texts(once));
  }
}

TEST_CASE("casing classes") {
  CHECK(casing_class("ASA") == CasingClass::AllUpper);
  CHECK(casing_class("aspirin") == CasingClass::AllLower);
  CHECK(casing_class("325") == CasingClass::Numeric);
  CHECK(casing_class("3.25") == CasingClass::Numeric);
  CHECK(casing_class("1,000") == CasingClass::Numeric);
  CHECK(casing_class("B12") == CasingClass::MixedDigit);
  CHECK(casing_class("40mg") == CasingClass::MixedDigit);
  CHECK(casing_class("3.") == CasingClass::MixedDigit);
  CHECK(casing_class("Percocet") == CasingClass::InitialUpper);
  CHECK(casing_class("McDonald") == CasingClass::Other);
  CHECK(casing_class(",") == CasingClass::Other);
  CHECK_THROWS_AS(casing_class(""), std::invalid_argument);
}

TEST_CASE("casing classes partition random strings") {
  medtl::Rng rng(7);
  const std::string alphabet = "aZ09.,-/xQ";
  std::set<CasingClass> seen;
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    const auto n = 1 + rng.below(5);
    for (std::size_t k = 0; k < n; ++k) s += alphabet[rng.below(alphabet.size())];
    const auto c = casing_class(s);
    CHECK(c == casing_class(s));
    CHECK(static_cast<std::size_t>(c) < kCasingClassCount);
    seen.insert(c);
  }
  CHECK(seen.size() == kCasingClassCount);
}

TEST_CASE("char ids pad and truncate") {
  CharVocab v;
  CHECK(v.add(U'a') == 2);
  CHECK(v.add(U'b') == 3);
  CHECK(char_ids("ab", v, 4) == std::vector<int>{2, 3, CharVocab::kPad, CharVocab::kPad});
  CHECK(char_ids("abcde", v, 3) == std::vector<int>{2, 3, CharVocab::kUnk});
  CHECK(char_ids("", v, 2) == std::vector<int>{CharVocab::kPad, CharVocab::kPad});
  const auto round = CharVocab::from_chars(v.chars());
  CHECK(round.id(U'b') == 3);
  CHECK(round.size() == v.size());
}

TEST_CASE("utf8 round trip counts code points") {
  const std::string s = "na\xC3\xAFve \xE2\x82\xAC";
  CHECK(utf8_length(s) == 7);
  CHECK(utf8_encode(utf8_decode(s)) == s);
}
