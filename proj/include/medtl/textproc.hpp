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

// Deterministic sentence segmentation and tokenization for clinical text.
// All offsets are counted in Unicode scalar values (code points), never bytes.

#ifndef MEDTL_TEXTPROC_HPP
#define MEDTL_TEXTPROC_HPP

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace medtl::text {

std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t c);
std::size_t utf8_length(std::string_view s);

/// Lowercases ASCII letters only; everything else passes through.
std::string ascii_lower(std::string_view s);

struct CharRange {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  bool operator==(const CharRange&) const = default;
};

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;  // exclusive
  std::size_t sentence_index = 0;
  bool operator==(const Token&) const = default;
};

/// Abbreviations that never end a sentence and are kept as one token.
/// Stored lowercased.
class AbbreviationList {
 public:
  AbbreviationList() = default;
  explicit AbbreviationList(std::set<std::string> entries);

  /// The built-in clinical list (about thirty entries).
  static const AbbreviationList& clinical_default();
  /// One abbreviation per line; '#' starts a comment.
  static AbbreviationList parse(std::string_view file_text);
  static AbbreviationList load(const std::string& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::set<std::string> entries_;
};

std::vector<CharRange> segment_sentences(
    std::u32string_view text,
    const AbbreviationList& abbrevs = AbbreviationList::clinical_default());
std::vector<CharRange> segment_sentences(
    std::string_view text,
    const AbbreviationList& abbrevs = AbbreviationList::clinical_default());

/// Tokens of one sentence; `base_offset` is the sentence start in the document.
/// sentence_index is left at 0.
std::vector<Token> tokenize(
    std::string_view sentence_text, std::size_t base_offset,
    const AbbreviationList& abbrevs = AbbreviationList::clinical_default());

struct TokenizedText {
  std::vector<CharRange> sentences;
  std::vector<Token> tokens;  // document order; sentence_index set
  /// [first, last) token index range per sentence.
  std::vector<std::pair<std::size_t, std::size_t>> sentence_tokens;
};

TokenizedText tokenize_document(
    std::string_view text,
    const AbbreviationList& abbrevs = AbbreviationList::clinical_default());

enum class CasingClass : int {
  AllUpper = 0,
  AllLower,
  Numeric,
  MixedDigit,
  InitialUpper,
  Other,
};
inline constexpr std::size_t kCasingClassCount = 6;

/// Throws std::invalid_argument on an empty token.
CasingClass casing_class(std::string_view token);
const char* casing_name(CasingClass c);

/// Code point -> id map with reserved PAD=0 and UNK=1.
class CharVocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  CharVocab() = default;
  int add(char32_t c);
  int id(char32_t c) const;
  std::size_t size() const { return ids_.size() + 2; }
  /// Characters in id order (ids 2..size-1).
  std::u32string chars() const;
  static CharVocab from_chars(std::u32string_view chars);

 private:
  std::map<char32_t, int> ids_;
};

/// First max_len characters as ids, right-padded with PAD.
std::vector<int> char_ids(std::string_view token, const CharVocab& vocab, std::size_t max_len);

}  // namespace medtl::text

#endif  // MEDTL_TEXTPROC_HPP
