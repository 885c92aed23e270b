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

// Clinical annotation corpora: i2b2-2009 medication annotations, i2b2-2012
// EVENT/TIMEX3/TLINK annotations, IOB projection, CoNLL files, corpus
// splitting and synthetic fixture corpora.

#ifndef MEDTL_CORPUS_HPP
#define MEDTL_CORPUS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medtl/textproc.hpp"

namespace medtl::corpus {

/// The three retained temporal relation classes. The numeric order is the
/// classifier's class order and its tie-break order.
enum class Relation : int { After = 0, Overlap = 1, Before = 2 };
inline constexpr std::size_t kRelationCount = 3;

const char* relation_name(Relation r);
/// Accepts the three retained names, case-insensitively.
std::optional<Relation> parse_relation(std::string_view name);
/// BEFORE <-> AFTER, OVERLAP fixed. Swaps the direction of a link.
Relation invert(Relation r);

/// True for the eight i2b2-2012 TLINK type names (any case).
bool is_i2b2_relation_name(std::string_view name);

struct EntitySpan {
  std::string tag;
  std::size_t start_token = 0;  // document token ordinal
  std::size_t end_token = 0;    // inclusive
  std::string surface;
  std::string id;               // annotation id (2012) or empty
  std::size_t start_char = 0;   // code points
  std::size_t end_char = 0;     // exclusive
  bool operator==(const EntitySpan&) const = default;
};

class TagScheme {
 public:
  static constexpr int kPad = 0;
  static constexpr int kOutside = 1;

  explicit TagScheme(std::vector<std::string> base_tags);

  /// m, do, f, mo, du, r
  static const TagScheme& i2b2_2009();
  /// CLINICAL_DEPT, EVIDENTIAL, TEST, PROBLEM, TREATMENT, OCCURRENCE
  static const TagScheme& i2b2_2012();

  const std::vector<std::string>& base_tags() const { return base_tags_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  bool has_tag(std::string_view tag) const;

  /// Throws SchemeError on unknown labels.
  int id(std::string_view label) const;
  const std::string& label(int id) const;
  int begin_id(std::string_view tag) const;
  int inside_id(std::string_view tag) const;

 private:
  std::vector<std::string> base_tags_;
  std::vector<std::string> labels_;
  std::map<std::string, int, std::less<>> ids_;
};

struct TLink {
  std::string source;
  std::string target;
  Relation relation = Relation::Overlap;
  bool operator==(const TLink&) const = default;
};

struct AnnotatedDocument {
  std::string doc_id;
  std::string text;
  text::TokenizedText tokenized;
  /// Spans projected to IOB; sorted by (start_token, end_token).
  std::vector<EntitySpan> entities;
  std::vector<TLink> tlinks;
  std::map<std::string, EntitySpan> events;
  std::map<std::string, EntitySpan> timexes;
  std::vector<std::string> warnings;

  const std::vector<text::Token>& tokens() const { return tokenized.tokens; }
};

struct ParseOptions {
  /// Skip and count unparseable lines instead of throwing.
  bool lenient = false;
};

/// Tokenized document with no annotations.
AnnotatedDocument make_document(std::string doc_id, std::string text);

/// Lines like `m="percocet" 5:2 5:2||do="nm"||...`; positions are
/// line:token with 1-based lines and 0-based whitespace-token indices.
AnnotatedDocument parse_2009_annotations(std::string doc_id, std::string doc_text,
                                         std::string_view ann_text, ParseOptions opts = {});

/// EVENT/TIMEX3 elements with id, start, end (0-based code points, end
/// exclusive) and type. TLINK lines are `TLINK <from> <TYPE> <to>`; when
/// `tlink_text` is empty, TLINK elements in the XML are used instead.
AnnotatedDocument parse_2012_annotations(std::string doc_id, std::string doc_text,
                                         std::string_view xml_text, std::string_view tlink_text,
                                         ParseOptions opts = {});

std::string write_2009_annotations(const AnnotatedDocument& doc);
std::string write_2012_xml(const AnnotatedDocument& doc);
std::string write_tlinks(const AnnotatedDocument& doc);

/// Span covering the document tokens overlapping [start_char, end_char).
/// Throws RangeError when no token is covered.
EntitySpan span_from_chars(const AnnotatedDocument& doc, std::string tag, std::size_t start_char,
                           std::size_t end_char, std::string id = {});

struct IobProjection {
  std::vector<std::vector<int>> labels;  // one sequence per sentence
  std::size_t cross_sentence = 0;        // spans split at sentence boundaries
  std::size_t dropped_overlaps = 0;      // spans lost to a longer overlapping span
};

IobProjection spans_to_iob(const AnnotatedDocument& doc, const TagScheme& scheme);

/// Sequence-relative spans (start_token/end_token index into `labels`).
/// Orphan I-x is repaired as B-x; "PAD" is treated like "O".
std::vector<EntitySpan> iob_to_spans(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& labels);
std::vector<EntitySpan> iob_to_spans(const std::vector<std::string>& tokens,
                                     const std::vector<int>& label_ids, const TagScheme& scheme);
/// Inverse of iob_to_spans for sequence-relative spans: B- on the first
/// token, I- on the rest, O elsewhere. Throws RangeError past `n`.
std::vector<std::string> spans_to_labels(std::size_t n, const std::vector<EntitySpan>& spans);

struct SplitRatios {
  double train = 0.70;
  double val = 0.15;
  double test = 0.15;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Document-level split. Validation and test get floor(ratio * n), at
/// least one each; the remainder goes to training. Indices are sorted.
Split split_corpus(std::size_t n_docs, std::uint64_t seed, SplitRatios ratios = {});

// ---------------------------------------------------------------------------
// CoNLL

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
  bool operator==(const LabeledSentence&) const = default;
};

struct ConllDocument {
  std::string doc_id;
  std::vector<LabeledSentence> sentences;
  bool operator==(const ConllDocument&) const = default;
};

std::string write_conll_sentences(const std::vector<LabeledSentence>& sentences);
std::string write_conll(const std::vector<ConllDocument>& docs);
/// Throws ParseError (with line number) on rows that do not have two columns.
std::vector<ConllDocument> read_conll(std::string_view text);

ConllDocument to_conll(const AnnotatedDocument& doc, const TagScheme& scheme);

// ---------------------------------------------------------------------------
// Fixtures

struct FixtureSpec {
  std::size_t n_docs = 10;
  std::uint64_t seed = 1;
};

/// Synthetic discharge summaries carrying both 2009 medication spans (in
/// `entities`, 2009 tags) and 2012 events/timexes/TLINKs. Document 0 is the
/// Methotrexate timeline scenario.
std::vector<AnnotatedDocument> generate_fixture_corpus(const FixtureSpec& spec);

/// The Methotrexate timeline document on its own.
AnnotatedDocument timeline_fixture_document();

/// Sentences whose words map one-to-one to a tag (2009 tag set), for overfit
/// checks of the taggers.
std::vector<LabeledSentence> separable_ner_fixture(std::size_t n_sentences, std::uint64_t seed);

}  // namespace medtl::corpus

#endif  // MEDTL_CORPUS_HPP
