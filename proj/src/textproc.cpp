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

#include "medtl/textproc.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace medtl::text {

namespace {

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0 || c == 0x2028 || c == 0x2029;
}
bool is_ascii_alpha(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_upper(char32_t c) { return c >= U'A' && c <= U'Z'; }
bool is_lower(char32_t c) { return c >= U'a' && c <= U'z'; }

// Non-ASCII code points count as word characters so accented words stay whole.
bool is_word_char(char32_t c) { return is_ascii_alpha(c) || is_digit(c) || c > 0x7F; }
bool is_punct(char32_t c) { return !is_space(c) && !is_word_char(c); }
bool is_terminator(char32_t c) { return c == U'.' || c == U'!' || c == U'?'; }
bool is_closer(char32_t c) { return c == U')' || c == U']' || c == U'"' || c == U'\''; }
bool is_joiner(char32_t c) {
  return c == U'.' || c == U',' || c == U'/' || c == U'-' || c == U':' || c == U'\'';
}

std::string lower32(std::u32string_view s) {
  std::string out;
  for (char32_t c : s) {
    if (is_upper(c)) c = c - U'A' + U'a';
    out += utf8_encode(c);
  }
  return out;
}

}  // namespace

std::u32string utf8_decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
    }
    if (len > 1) {
      if (i + len > s.size()) {
        len = 1;
      } else {
        cp = b0 & (0xFF >> (len + 1));
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
          const auto b = static_cast<unsigned char>(s[i + k]);
          if ((b >> 6) != 0x2) {
            ok = false;
            break;
          }
          cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok) {
          cp = 0xFFFD;
          len = 1;
        }
      }
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
  return out;
}

std::string utf8_encode(std::u32string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char32_t c : s) out += utf8_encode(c);
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

// ---------------------------------------------------------------------------
// Abbreviations

AbbreviationList::AbbreviationList(std::set<std::string> entries) {
  for (const auto& e : entries) entries_.insert(ascii_lower(e));
}

const AbbreviationList& AbbreviationList::clinical_default() {
  static const AbbreviationList list(std::set<std::string>{
      "dr.",   "mr.",    "mrs.",   "ms.",   "st.",   "vs.",    "e.g.",   "i.e.",
      "etc.",  "p.o.",   "q.d.",   "b.i.d.", "t.i.d.", "q.i.d.", "q.h.s.", "p.r.n.",
      "q.o.d.", "q.am.", "q.pm.",  "i.v.",  "i.m.",  "s.c.",   "a.m.",   "p.m.",
      "no.",   "approx.", "pt.",   "hx.",   "dx.",   "tx.",    "sx.",    "fig.",
  });
  return list;
}

AbbreviationList AbbreviationList::parse(std::string_view file_text) {
  std::set<std::string> entries;
  std::istringstream in{std::string(file_text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    entries.insert(line.substr(b, e - b + 1));
  }
  return AbbreviationList(std::move(entries));
}

AbbreviationList AbbreviationList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open abbreviation list: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool AbbreviationList::contains(std::string_view word) const {
  return entries_.count(ascii_lower(word)) > 0;
}

// ---------------------------------------------------------------------------
// Segmentation

std::vector<CharRange> segment_sentences(std::u32string_view text,
                                         const AbbreviationList& abbrevs) {
  std::vector<CharRange> out;
  const std::size_t n = text.size();
  std::size_t start = 0;

  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b < e) out.push_back({b, e});
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t c = text[i];
    if (c == U'\n') {
      // Blank line = paragraph break.
      std::size_t j = i + 1;
      while (j < n && is_space(text[j]) && text[j] != U'\n') ++j;
      if (j < n && text[j] == U'\n') {
        emit(start, i);
        start = j;
        i = j;
        continue;
      }
    }
    if (is_terminator(c)) {
      std::size_t end = i + 1;
      while (end < n && (is_terminator(text[end]) || is_closer(text[end]))) ++end;
      if (end < n && is_space(text[end])) {
        std::size_t k = end;
        while (k < n && is_space(text[k])) ++k;
        const bool next_starts = k < n && (is_upper(text[k]) || is_digit(text[k]));
        bool abbreviation = false;
        if (c == U'.') {
          std::size_t w = i;
          while (w > start && !is_space(text[w - 1])) --w;
          while (w < i && is_punct(text[w]) && text[w] != U'.') ++w;
          abbreviation = abbrevs.contains(lower32(text.substr(w, i + 1 - w)));
        }
        if (next_starts && !abbreviation) {
          emit(start, end);
          start = end;
          i = end;
          continue;
        }
      }
      i = end;
      continue;
    }
    ++i;
  }
  emit(start, n);
  return out;
}

std::vector<CharRange> segment_sentences(std::string_view text, const AbbreviationList& abbrevs) {
  return segment_sentences(std::u32string_view(utf8_decode(text)), abbrevs);
}

// ---------------------------------------------------------------------------
// Tokenization

namespace {

void push_token(std::vector<Token>& out, std::u32string_view chunk, std::size_t b, std::size_t e,
                std::size_t base) {
  out.push_back({utf8_encode(chunk.substr(b, e - b)), base + b, base + e, 0});
}

// Splits the middle of a chunk (no leading/trailing punctuation) at
// punctuation that does not join two word characters.
void split_middle(std::vector<Token>& out, std::u32string_view chunk, std::size_t b,
                  std::size_t e, std::size_t base) {
  std::size_t run = b;
  for (std::size_t i = b; i < e; ++i) {
    if (!is_punct(chunk[i])) continue;
    const bool joins = is_joiner(chunk[i]) && i > b && i + 1 < e && is_word_char(chunk[i - 1]) &&
                       is_word_char(chunk[i + 1]);
    if (joins) continue;
    if (run < i) push_token(out, chunk, run, i, base);
    push_token(out, chunk, i, i + 1, base);
    run = i + 1;
  }
  if (run < e) push_token(out, chunk, run, e, base);
}

void tokenize_chunk(std::vector<Token>& out, std::u32string_view chunk, std::size_t base,
                    const AbbreviationList& abbrevs) {
  std::size_t b = 0;
  std::size_t e = chunk.size();
  while (b < e && is_punct(chunk[b])) {
    push_token(out, chunk, b, b + 1, base);
    ++b;
  }
  if (b == e) return;

  // Abbreviation, possibly followed by trailing non-period punctuation.
  std::size_t ab_end = e;
  while (ab_end > b && is_punct(chunk[ab_end - 1]) && chunk[ab_end - 1] != U'.') --ab_end;
  if (ab_end > b && abbrevs.contains(lower32(chunk.substr(b, ab_end - b)))) {
    push_token(out, chunk, b, ab_end, base);
    for (std::size_t i = ab_end; i < e; ++i) push_token(out, chunk, i, i + 1, base);
    return;
  }

  std::size_t m = e;
  while (m > b && is_punct(chunk[m - 1])) --m;
  split_middle(out, chunk, b, m, base);
  for (std::size_t i = m; i < e; ++i) push_token(out, chunk, i, i + 1, base);
}

std::vector<Token> tokenize32(std::u32string_view s, std::size_t base,
                              const AbbreviationList& abbrevs) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) tokenize_chunk(out, s.substr(i, j - i), base + i, abbrevs);
    i = j;
  }
  return out;
}

}  // namespace

std::vector<Token> tokenize(std::string_view sentence_text, std::size_t base_offset,
                            const AbbreviationList& abbrevs) {
  const std::u32string s = utf8_decode(sentence_text);
  return tokenize32(s, base_offset, abbrevs);
}

TokenizedText tokenize_document(std::string_view text, const AbbreviationList& abbrevs) {
  const std::u32string doc = utf8_decode(text);
  TokenizedText out;
  out.sentences = segment_sentences(std::u32string_view(doc), abbrevs);
  for (std::size_t si = 0; si < out.sentences.size(); ++si) {
    const auto& r = out.sentences[si];
    auto toks = tokenize32(std::u32string_view(doc).substr(r.begin, r.end - r.begin), r.begin,
                           abbrevs);
    const std::size_t first = out.tokens.size();
    for (auto& t : toks) {
      t.sentence_index = si;
      out.tokens.push_back(std::move(t));
    }
    out.sentence_tokens.emplace_back(first, out.tokens.size());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Casing

CasingClass casing_class(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("casing_class: empty token");
  const std::u32string s = utf8_decode(token);

  bool all_letters = true, all_upper = true, all_lower = true, any_digit = false,
       any_nondigit = false;
  for (char32_t c : s) {
    if (!is_ascii_alpha(c)) all_letters = false;
    if (!is_upper(c)) all_upper = false;
    if (!is_lower(c)) all_lower = false;
    if (is_digit(c)) any_digit = true; else any_nondigit = true;
  }

  // Digits, with . , - allowed strictly between digits.
  bool numeric = is_digit(s.front()) && is_digit(s.back());
  for (std::size_t i = 0; numeric && i < s.size(); ++i) {
    if (is_digit(s[i])) continue;
    const bool sep = s[i] == U'.' || s[i] == U',' || s[i] == U'-';
    numeric = sep && is_digit(s[i - 1]) && is_digit(s[i + 1]);
  }

  if (numeric) return CasingClass::Numeric;
  if (all_letters && all_upper) return CasingClass::AllUpper;
  if (all_letters && all_lower) return CasingClass::AllLower;
  if (any_digit && any_nondigit) return CasingClass::MixedDigit;
  if (s.size() > 1 && is_upper(s.front())) {
    bool rest_lower = true;
    for (std::size_t i = 1; i < s.size(); ++i) rest_lower = rest_lower && is_lower(s[i]);
    if (rest_lower) return CasingClass::InitialUpper;
  }
  return CasingClass::Other;
}

const char* casing_name(CasingClass c) {
  switch (c) {
    case CasingClass::AllUpper: return "ALL_UPPER";
    case CasingClass::AllLower: return "ALL_LOWER";
    case CasingClass::Numeric: return "NUMERIC";
    case CasingClass::MixedDigit: return "MIXED_DIGIT";
    case CasingClass::InitialUpper: return "INITIAL_UPPER";
    case CasingClass::Other: return "OTHER";
  }
  return "OTHER";
}

// ---------------------------------------------------------------------------
// Characters

int CharVocab::add(char32_t c) {
  auto [it, inserted] = ids_.try_emplace(c, static_cast<int>(ids_.size()) + 2);
  return it->second;
}

int CharVocab::id(char32_t c) const {
  auto it = ids_.find(c);
  return it == ids_.end() ? kUnk : it->second;
}

std::u32string CharVocab::chars() const {
  std::u32string out(ids_.size(), U'\0');
  for (const auto& [c, id] : ids_) out[static_cast<std::size_t>(id - 2)] = c;
  return out;
}

CharVocab CharVocab::from_chars(std::u32string_view chars) {
  CharVocab v;
  for (char32_t c : chars) v.add(c);
  return v;
}

std::vector<int> char_ids(std::string_view token, const CharVocab& vocab, std::size_t max_len) {
  std::vector<int> out(max_len, CharVocab::kPad);
  const std::u32string s = utf8_decode(token);
  for (std::size_t i = 0; i < s.size() && i < max_len; ++i) out[i] = vocab.id(s[i]);
  return out;
}

}  // namespace medtl::text
