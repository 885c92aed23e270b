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

#include "medtl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::corpus {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

// Collapses whitespace runs to single spaces.
std::string join_ws(std::string_view s) {
  std::string out;
  for (const auto& w : split_ws(s)) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

bool is_punct_token(const std::string& t) {
  return text::utf8_length(t) == 1 && !std::isalnum(static_cast<unsigned char>(t[0])) &&
         static_cast<unsigned char>(t[0]) < 0x80;
}

// Whitespace tokens per line, in code points; the i2b2-2009 coordinate system.
struct LineIndex {
  struct WsToken {
    std::size_t begin, end;
  };
  std::vector<std::vector<WsToken>> lines;

  explicit LineIndex(const std::u32string& doc) {
    lines.emplace_back();
    std::size_t i = 0;
    while (i < doc.size()) {
      if (doc[i] == U'\n') {
        lines.emplace_back();
        ++i;
        continue;
      }
      if (doc[i] == U' ' || doc[i] == U'\t' || doc[i] == U'\r') {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < doc.size() && doc[j] != U'\n' && doc[j] != U' ' && doc[j] != U'\t' &&
             doc[j] != U'\r')
        ++j;
      lines.back().push_back({i, j});
      i = j;
    }
  }

  // 1-based line, 0-based token.
  const WsToken* at(std::size_t line, std::size_t tok) const {
    if (line == 0 || line > lines.size()) return nullptr;
    const auto& l = lines[line - 1];
    return tok < l.size() ? &l[tok] : nullptr;
  }

  std::pair<std::size_t, std::size_t> locate(std::size_t ch) const {
    for (std::size_t l = 0; l < lines.size(); ++l) {
      for (std::size_t t = 0; t < lines[l].size(); ++t) {
        if (lines[l][t].begin <= ch && ch < lines[l][t].end) return {l + 1, t};
      }
    }
    throw RangeError("character offset " + std::to_string(ch) + " is not inside a token");
  }
};

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    const auto semi = s.find(';', i);
    if (semi == std::string_view::npos) {
      out += s[i];
      continue;
    }
    const auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "amp") out += '&';
    else if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else {
      out += s[i];
      continue;
    }
    i = semi;
  }
  return out;
}

struct XmlElement {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::size_t line = 0;
};

// Self-closing or open tags named in `names`; attribute values must be quoted.
std::vector<XmlElement> scan_elements(std::string_view xml, const std::set<std::string>& names) {
  std::vector<XmlElement> out;
  std::size_t pos = 0;
  std::size_t line = 1;
  std::size_t line_pos = 0;
  auto line_of = [&](std::size_t p) {
    for (; line_pos < p; ++line_pos) {
      if (xml[line_pos] == '\n') ++line;
    }
    return line;
  };
  while ((pos = xml.find('<', pos)) != std::string_view::npos) {
    std::size_t p = pos + 1;
    std::size_t q = p;
    while (q < xml.size() && (std::isalnum(static_cast<unsigned char>(xml[q])) || xml[q] == '_'))
      ++q;
    const std::string name(xml.substr(p, q - p));
    if (!names.count(name)) {
      pos = q;
      continue;
    }
    XmlElement el;
    el.name = name;
    el.line = line_of(pos);
    std::size_t i = q;
    for (;;) {
      while (i < xml.size() && std::isspace(static_cast<unsigned char>(xml[i]))) ++i;
      if (i >= xml.size()) throw ParseError("unterminated <" + name + "> element", el.line);
      if (xml[i] == '/' || xml[i] == '>') break;
      std::size_t k = i;
      while (k < xml.size() && xml[k] != '=' && !std::isspace(static_cast<unsigned char>(xml[k])))
        ++k;
      const std::string key(xml.substr(i, k - i));
      while (k < xml.size() && std::isspace(static_cast<unsigned char>(xml[k]))) ++k;
      if (k >= xml.size() || xml[k] != '=')
        throw ParseError("attribute '" + key + "' without value in <" + name + ">", el.line);
      ++k;
      while (k < xml.size() && std::isspace(static_cast<unsigned char>(xml[k]))) ++k;
      if (k >= xml.size() || (xml[k] != '"' && xml[k] != '\''))
        throw ParseError("unquoted attribute '" + key + "' in <" + name + ">", el.line);
      const char quote = xml[k];
      const auto close = xml.find(quote, k + 1);
      if (close == std::string_view::npos)
        throw ParseError("unterminated attribute '" + key + "'", el.line);
      el.attrs[key] = xml_unescape(xml.substr(k + 1, close - k - 1));
      i = close + 1;
    }
    out.push_back(std::move(el));
    pos = i;
  }
  return out;
}

std::size_t parse_offset(const std::string& s, const std::string& what, std::size_t line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw ParseError("bad " + what + " offset '" + s + "'", line);
  return static_cast<std::size_t>(std::stoull(s));
}

const std::set<std::string> kEventTypes = {"CLINICAL_DEPT", "EVIDENTIAL", "TEST",
                                           "PROBLEM",       "TREATMENT",  "OCCURRENCE"};

const std::vector<std::string> kI2b2Relations = {"BEFORE",   "AFTER",    "SIMULTANEOUS",
                                                 "OVERLAP",  "BEGUN_BY", "ENDED_BY",
                                                 "DURING",   "BEFORE_OVERLAP"};

void sort_spans(std::vector<EntitySpan>& spans) {
  std::stable_sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return std::tie(a.start_token, a.end_token) < std::tie(b.start_token, b.end_token);
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Relations

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::After: return "AFTER";
    case Relation::Overlap: return "OVERLAP";
    case Relation::Before: return "BEFORE";
  }
  return "OVERLAP";
}

std::optional<Relation> parse_relation(std::string_view name) {
  const std::string u = upper(name);
  if (u == "AFTER") return Relation::After;
  if (u == "OVERLAP") return Relation::Overlap;
  if (u == "BEFORE") return Relation::Before;
  return std::nullopt;
}

Relation invert(Relation r) {
  switch (r) {
    case Relation::After: return Relation::Before;
    case Relation::Before: return Relation::After;
    case Relation::Overlap: return Relation::Overlap;
  }
  return r;
}

bool is_i2b2_relation_name(std::string_view name) {
  const std::string u = upper(name);
  return std::find(kI2b2Relations.begin(), kI2b2Relations.end(), u) != kI2b2Relations.end();
}

// ---------------------------------------------------------------------------
// TagScheme

TagScheme::TagScheme(std::vector<std::string> base_tags) : base_tags_(std::move(base_tags)) {
  labels_ = {"PAD", "O"};
  for (const auto& t : base_tags_) {
    labels_.push_back("B-" + t);
    labels_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!ids_.emplace(labels_[i], static_cast<int>(i)).second)
      throw SchemeError("duplicate label " + labels_[i]);
  }
}

const TagScheme& TagScheme::i2b2_2009() {
  static const TagScheme s({"m", "do", "f", "mo", "du", "r"});
  return s;
}

const TagScheme& TagScheme::i2b2_2012() {
  static const TagScheme s(
      {"CLINICAL_DEPT", "EVIDENTIAL", "TEST", "PROBLEM", "TREATMENT", "OCCURRENCE"});
  return s;
}

bool TagScheme::has_tag(std::string_view tag) const {
  return std::find(base_tags_.begin(), base_tags_.end(), tag) != base_tags_.end();
}

int TagScheme::id(std::string_view label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) throw SchemeError("unknown label '" + std::string(label) + "'");
  return it->second;
}

const std::string& TagScheme::label(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size())
    throw SchemeError("label id " + std::to_string(id) + " out of range");
  return labels_[static_cast<std::size_t>(id)];
}

int TagScheme::begin_id(std::string_view tag) const { return id("B-" + std::string(tag)); }
int TagScheme::inside_id(std::string_view tag) const { return id("I-" + std::string(tag)); }

// ---------------------------------------------------------------------------
// Documents

AnnotatedDocument make_document(std::string doc_id, std::string text) {
  AnnotatedDocument doc;
  doc.doc_id = std::move(doc_id);
  doc.text = std::move(text);
  doc.tokenized = text::tokenize_document(doc.text);
  return doc;
}

EntitySpan span_from_chars(const AnnotatedDocument& doc, std::string tag, std::size_t start_char,
                           std::size_t end_char, std::string id) {
  const auto& toks = doc.tokens();
  std::size_t first = toks.size(), last = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].end > start_char && toks[i].start < end_char) {
      first = std::min(first, i);
      last = i;
    }
  }
  if (first == toks.size())
    throw RangeError("span [" + std::to_string(start_char) + "," + std::to_string(end_char) +
                     ") covers no token");
  while (first < last && is_punct_token(toks[first].text)) ++first;
  while (last > first && is_punct_token(toks[last].text)) --last;

  EntitySpan span;
  span.tag = std::move(tag);
  span.id = std::move(id);
  span.start_token = first;
  span.end_token = last;
  span.start_char = toks[first].start;
  span.end_char = toks[last].end;
  const std::u32string doc32 = text::utf8_decode(doc.text);
  span.surface = text::utf8_encode(
      std::u32string_view(doc32).substr(span.start_char, span.end_char - span.start_char));
  return span;
}

AnnotatedDocument parse_2009_annotations(std::string doc_id, std::string doc_text,
                                         std::string_view ann_text, ParseOptions opts) {
  AnnotatedDocument doc = make_document(std::move(doc_id), std::move(doc_text));
  const std::u32string doc32 = text::utf8_decode(doc.text);
  const LineIndex index(doc32);
  const auto& scheme = TagScheme::i2b2_2009();

  std::istringstream in{std::string(ann_text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      std::vector<EntitySpan> spans;
      std::size_t pos = 0;
      while (pos <= line.size()) {
        auto bar = line.find("||", pos);
        if (bar == std::string::npos) bar = line.size();
        const std::string seg = trim(std::string_view(line).substr(pos, bar - pos));
        pos = bar + 2;
        if (seg.empty()) throw ParseError("empty segment", lineno);

        const auto eq = seg.find('=');
        if (eq == std::string::npos || eq + 1 >= seg.size() || seg[eq + 1] != '"')
          throw ParseError("expected tag=\"surface\" in '" + seg + "'", lineno);
        const std::string tag = trim(std::string_view(seg).substr(0, eq));
        const auto close = seg.find('"', eq + 2);
        if (close == std::string::npos) throw ParseError("unterminated surface", lineno);
        const std::string surface = seg.substr(eq + 2, close - eq - 2);
        const std::string rest = trim(std::string_view(seg).substr(close + 1));

        if (tag == "ln") continue;  // list/narrative marker
        if (!scheme.has_tag(tag)) throw SchemeError("line " + std::to_string(lineno) +
                                                    ": unknown tag '" + tag + "'");
        if (surface == "nm") continue;

        // One or more "L:T L:T" ranges, comma separated for discontinuous spans.
        std::istringstream ranges(rest);
        std::string range;
        bool any = false;
        while (std::getline(ranges, range, ',')) {
          const auto parts = split_ws(range);
          if (parts.size() != 2) throw ParseError("expected 'L:T L:T' in '" + rest + "'", lineno);
          std::size_t lt[2][2];
          for (int k = 0; k < 2; ++k) {
            const auto colon = parts[static_cast<std::size_t>(k)].find(':');
            if (colon == std::string::npos) throw ParseError("bad position '" + parts[k] + "'", lineno);
            lt[k][0] = parse_offset(parts[k].substr(0, colon), "line", lineno);
            lt[k][1] = parse_offset(parts[k].substr(colon + 1), "token", lineno);
          }
          const auto* a = index.at(lt[0][0], lt[0][1]);
          const auto* b = index.at(lt[1][0], lt[1][1]);
          if (!a || !b || b->end <= a->begin)
            throw RangeError("line " + std::to_string(lineno) + ": position out of range in '" +
                             trim(range) + "'");
          std::string joined;
          for (std::size_t l = lt[0][0]; l <= lt[1][0]; ++l) {
            for (const auto& w : index.lines[l - 1]) {
              if (w.begin < a->begin || w.end > b->end) continue;
              if (!joined.empty()) joined += ' ';
              joined += text::utf8_encode(
                  std::u32string_view(doc32).substr(w.begin, w.end - w.begin));
            }
          }
          EntitySpan span = span_from_chars(doc, tag, a->begin, b->end);
          const std::string want = text::ascii_lower(surface);
          if (!any && text::ascii_lower(joined) != want &&
              text::ascii_lower(join_ws(span.surface)) != want) {
            const std::string msg = "line " + std::to_string(lineno) + ": surface '" + surface +
                                    "' does not match text '" + joined + "'";
            if (!opts.lenient) throw ParseError(msg);
            doc.warnings.push_back(msg);
          }
          spans.push_back(std::move(span));
          any = true;
        }
        if (!any) throw ParseError("missing position for '" + tag + "'", lineno);
      }
      for (auto& s : spans) doc.entities.push_back(std::move(s));
    } catch (const Error& e) {
      if (!opts.lenient) throw;
      doc.warnings.push_back(std::string("skipped: ") + e.what());
    }
  }
  sort_spans(doc.entities);
  return doc;
}

AnnotatedDocument parse_2012_annotations(std::string doc_id, std::string doc_text,
                                         std::string_view xml_text, std::string_view tlink_text,
                                         ParseOptions opts) {
  AnnotatedDocument doc = make_document(std::move(doc_id), std::move(doc_text));
  const std::u32string doc32 = text::utf8_decode(doc.text);

  const bool inline_links = trim(tlink_text).empty();
  std::set<std::string> names = {"EVENT", "TIMEX3"};
  if (inline_links) names.insert("TLINK");
  const auto elements = scan_elements(xml_text, names);

  auto fail = [&](const Error& e) {
    if (!opts.lenient) throw;
    doc.warnings.push_back(std::string("skipped: ") + e.what());
  };

  std::vector<std::pair<TLink, std::size_t>> raw_links;  // link, line
  std::size_t dropped = 0;

  auto add_link = [&](const std::string& from, const std::string& type, const std::string& to,
                      std::size_t line) {
    if (!is_i2b2_relation_name(type))
      throw ParseError("unknown TLINK type '" + type + "'", line);
    const auto rel = parse_relation(type);
    if (!rel) {
      ++dropped;
      return;
    }
    raw_links.push_back({TLink{from, to, *rel}, line});
  };

  for (const auto& el : elements) {
    try {
      auto attr = [&](const char* k) -> const std::string& {
        auto it = el.attrs.find(k);
        if (it == el.attrs.end())
          throw ParseError("<" + el.name + "> missing attribute '" + k + "'", el.line);
        return it->second;
      };
      if (el.name == "TLINK") {
        add_link(attr("fromID"), attr("type"), attr("toID"), el.line);
        continue;
      }
      const std::string& id = attr("id");
      const std::size_t start = parse_offset(attr("start"), "start", el.line);
      const std::size_t end = parse_offset(attr("end"), "end", el.line);
      if (start >= end || end > doc32.size())
        throw RangeError("line " + std::to_string(el.line) + ": <" + el.name + " id=" + id +
                         "> offsets [" + std::to_string(start) + "," + std::to_string(end) +
                         ") outside text of length " + std::to_string(doc32.size()));
      if (auto it = el.attrs.find("text"); it != el.attrs.end()) {
        const std::string slice =
            text::utf8_encode(std::u32string_view(doc32).substr(start, end - start));
        if (slice != it->second)
          throw RangeError("line " + std::to_string(el.line) + ": <" + el.name + " id=" + id +
                           "> text '" + it->second + "' does not match '" + slice + "'");
      }
      const std::string type = el.attrs.count("type") ? el.attrs.at("type") : "";
      if (el.name == "EVENT") {
        if (!kEventTypes.count(type))
          throw SchemeError("line " + std::to_string(el.line) + ": unknown EVENT type '" + type +
                            "'");
        if (doc.events.count(id) || doc.timexes.count(id))
          throw LinkError("duplicate id " + id);
        doc.events.emplace(id, span_from_chars(doc, type, start, end, id));
      } else {
        if (doc.events.count(id) || doc.timexes.count(id))
          throw LinkError("duplicate id " + id);
        doc.timexes.emplace(id, span_from_chars(doc, type.empty() ? "DATE" : type, start, end, id));
      }
    } catch (const Error& e) {
      fail(e);
    }
  }

  if (!inline_links) {
    std::istringstream in{std::string(tlink_text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      try {
        const auto f = split_ws(t);
        if (f.size() != 4 || upper(f[0]) != "TLINK")
          throw ParseError("expected 'TLINK <from> <TYPE> <to>'", lineno);
        add_link(f[1], f[2], f[3], lineno);
      } catch (const Error& e) {
        fail(e);
      }
    }
  }

  auto known = [&](const std::string& id) { return doc.events.count(id) || doc.timexes.count(id); };
  for (auto& [link, line] : raw_links) {
    try {
      for (const auto* id : {&link.source, &link.target}) {
        if (!known(*id))
          throw LinkError("line " + std::to_string(line) + ": TLINK references unknown id '" +
                          *id + "'");
      }
      doc.tlinks.push_back(std::move(link));
    } catch (const Error& e) {
      fail(e);
    }
  }
  if (dropped)
    doc.warnings.push_back("dropped " + std::to_string(dropped) +
                           " TLINK(s) outside BEFORE/AFTER/OVERLAP");
  return doc;
}

// ---------------------------------------------------------------------------
// Writers

std::string write_2009_annotations(const AnnotatedDocument& doc) {
  const std::u32string doc32 = text::utf8_decode(doc.text);
  const LineIndex index(doc32);
  const auto& scheme = TagScheme::i2b2_2009();
  std::vector<const EntitySpan*> spans;
  for (const auto& e : doc.entities) {
    if (scheme.has_tag(e.tag)) spans.push_back(&e);
  }

  auto segment = [&](const EntitySpan& e) {
    const auto [l0, t0] = index.locate(e.start_char);
    const auto [l1, t1] = index.locate(e.end_char - 1);
    std::string joined;
    for (std::size_t l = l0; l <= l1; ++l) {
      for (const auto& w : index.lines[l - 1]) {
        if (w.end <= e.start_char || w.begin >= e.end_char) continue;
        if (!joined.empty()) joined += ' ';
        joined += text::utf8_encode(std::u32string_view(doc32).substr(w.begin, w.end - w.begin));
      }
    }
    std::ostringstream s;
    s << e.tag << "=\"" << text::ascii_lower(joined) << "\" " << l0 << ':' << t0 << ' ' << l1
      << ':' << t1;
    return s.str();
  };

  // A medication line claims the attribute spans that follow it in the same
  // sentence; unclaimed attributes get a line of their own.
  std::ostringstream out;
  std::vector<bool> used(spans.size(), false);
  const auto& toks = doc.tokens();
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i]->tag != "m") continue;
    used[i] = true;
    std::map<std::string, std::string> attrs;
    const auto sent = toks[spans[i]->start_token].sentence_index;
    for (std::size_t j = i + 1; j < spans.size() && spans[j]->tag != "m"; ++j) {
      if (toks[spans[j]->start_token].sentence_index != sent) break;
      if (attrs.count(spans[j]->tag)) continue;
      attrs[spans[j]->tag] = segment(*spans[j]);
      used[j] = true;
    }
    out << segment(*spans[i]);
    for (const char* t : {"do", "mo", "f", "du", "r"}) {
      auto it = attrs.find(t);
      out << "||" << (it == attrs.end() ? std::string(t) + "=\"nm\"" : it->second);
    }
    out << "||ln=\"narrative\"\n";
  }
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (!used[i]) out << segment(*spans[i]) << "||ln=\"narrative\"\n";
  }
  return out.str();
}

std::string write_2012_xml(const AnnotatedDocument& doc) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\" ?>\n<ClinicalNarrativeTemporalAnnotation>\n"
      << "<TAGS>\n";
  for (const auto& [id, e] : doc.events) {
    out << "<EVENT id=\"" << xml_escape(id) << "\" start=\"" << e.start_char << "\" end=\""
        << e.end_char << "\" text=\"" << xml_escape(e.surface) << "\" type=\"" << e.tag
        << "\" />\n";
  }
  for (const auto& [id, t] : doc.timexes) {
    out << "<TIMEX3 id=\"" << xml_escape(id) << "\" start=\"" << t.start_char << "\" end=\""
        << t.end_char << "\" text=\"" << xml_escape(t.surface) << "\" type=\"" << t.tag
        << "\" />\n";
  }
  out << "</TAGS>\n</ClinicalNarrativeTemporalAnnotation>\n";
  return out.str();
}

std::string write_tlinks(const AnnotatedDocument& doc) {
  std::ostringstream out;
  for (const auto& l : doc.tlinks) {
    out << "TLINK " << l.source << ' ' << relation_name(l.relation) << ' ' << l.target << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// IOB

IobProjection spans_to_iob(const AnnotatedDocument& doc, const TagScheme& scheme) {
  const auto& tok = doc.tokenized;
  IobProjection out;
  for (const auto& [b, e] : tok.sentence_tokens) out.labels.emplace_back(e - b, TagScheme::kOutside);

  std::vector<const EntitySpan*> spans;
  for (const auto& s : doc.entities) {
    if (scheme.has_tag(s.tag)) spans.push_back(&s);
  }
  for (const auto& [id, s] : doc.events) {
    if (scheme.has_tag(s.tag)) spans.push_back(&s);
  }
  std::stable_sort(spans.begin(), spans.end(), [](const EntitySpan* a, const EntitySpan* b) {
    const auto la = a->end_token - a->start_token, lb = b->end_token - b->start_token;
    if (la != lb) return la > lb;
    return a->start_token < b->start_token;
  });

  std::vector<bool> taken(tok.tokens.size(), false);
  for (const auto* s : spans) {
    if (s->end_token >= tok.tokens.size() || s->start_token > s->end_token)
      throw RangeError("span '" + s->surface + "' outside token range");
    bool clash = false;
    for (auto t = s->start_token; t <= s->end_token; ++t) clash = clash || taken[t];
    if (clash) {
      ++out.dropped_overlaps;
      continue;
    }
    std::size_t prev_sentence = SIZE_MAX;
    for (auto t = s->start_token; t <= s->end_token; ++t) {
      taken[t] = true;
      const auto si = tok.tokens[t].sentence_index;
      const auto local = t - tok.sentence_tokens[si].first;
      const bool starts = si != prev_sentence;
      if (starts && prev_sentence != SIZE_MAX) ++out.cross_sentence;
      out.labels[si][local] = starts ? scheme.begin_id(s->tag) : scheme.inside_id(s->tag);
      prev_sentence = si;
    }
  }
  return out;
}

std::vector<EntitySpan> iob_to_spans(const std::vector<std::string>& tokens,
                                     const std::vector<std::string>& labels) {
  std::vector<EntitySpan> out;
  std::optional<EntitySpan> open;
  auto close = [&] {
    if (!open) return;
    std::string surface;
    for (auto i = open->start_token; i <= open->end_token && i < tokens.size(); ++i) {
      if (!surface.empty()) surface += ' ';
      surface += tokens[i];
    }
    open->surface = std::move(surface);
    out.push_back(std::move(*open));
    open.reset();
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& l = labels[i];
    const bool b = l.rfind("B-", 0) == 0, in = l.rfind("I-", 0) == 0;
    if (!b && !in) {
      close();
      continue;
    }
    const std::string tag = l.substr(2);
    if (in && open && open->tag == tag) {
      open->end_token = i;
      continue;
    }
    close();
    open = EntitySpan{};
    open->tag = tag;
    open->start_token = open->end_token = i;
  }
  close();
  return out;
}

std::vector<EntitySpan> iob_to_spans(const std::vector<std::string>& tokens,
                                     const std::vector<int>& label_ids, const TagScheme& scheme) {
  std::vector<std::string> labels;
  labels.reserve(label_ids.size());
  for (int id : label_ids) labels.push_back(scheme.label(id));
  return iob_to_spans(tokens, labels);
}

std::vector<std::string> spans_to_labels(std::size_t n, const std::vector<EntitySpan>& spans) {
  std::vector<std::string> labels(n, "O");
  for (const auto& s : spans) {
    if (s.start_token > s.end_token || s.end_token >= n)
      throw RangeError("span [" + std::to_string(s.start_token) + ", " + std::to_string(s.end_token) +
                       "] outside a sequence of " + std::to_string(n));
    labels[s.start_token] = "B-" + s.tag;
    for (auto i = s.start_token + 1; i <= s.end_token; ++i) labels[i] = "I-" + s.tag;
  }
  return labels;
}

// ---------------------------------------------------------------------------
// Splitting

Split split_corpus(std::size_t n_docs, std::uint64_t seed, SplitRatios ratios) {
  if (n_docs < 3) throw UsageError("split_corpus needs at least 3 documents, got " +
                                   std::to_string(n_docs));
  const double sum = ratios.train + ratios.val + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9 || ratios.train < 0 || ratios.val < 0 || ratios.test < 0)
    throw UsageError("split ratios must be non-negative and sum to 1");

  const auto n = static_cast<double>(n_docs);
  const std::size_t n_val = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ratios.val * n + 1e-9)));
  const std::size_t n_test = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ratios.test * n + 1e-9)));
  if (n_val + n_test >= n_docs) throw UsageError("split leaves no training documents");

  std::vector<std::size_t> order(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  Split s;
  s.val.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val),
                order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val + n_test), order.end());
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

// ---------------------------------------------------------------------------
// CoNLL

std::string write_conll_sentences(const std::vector<LabeledSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      out += s.tokens[i];
      out += '\t';
      out += s.labels.at(i);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string write_conll(const std::vector<ConllDocument>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += "# doc_id: " + d.doc_id + "\n-DOCSTART-\tO\n\n";
    out += write_conll_sentences(d.sentences);
  }
  return out;
}

std::vector<ConllDocument> read_conll(std::string_view text) {
  std::vector<ConllDocument> docs;
  std::string pending_id;
  LabeledSentence cur;
  auto flush = [&] {
    if (cur.tokens.empty()) return;
    if (docs.empty()) docs.emplace_back();
    docs.back().sentences.push_back(std::move(cur));
    cur = {};
  };

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      const std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("doc_id:", 0) == 0) pending_id = trim(std::string_view(body).substr(7));
      continue;
    }
    const auto cols = split_ws(line);
    if (cols.size() != 2)
      throw ParseError("expected 2 columns (token, label), got " + std::to_string(cols.size()),
                       lineno);
    if (cols[0] == "-DOCSTART-") {
      flush();
      docs.emplace_back();
      docs.back().doc_id = pending_id;
      pending_id.clear();
      continue;
    }
    cur.tokens.push_back(cols[0]);
    cur.labels.push_back(cols[1]);
  }
  flush();
  return docs;
}

ConllDocument to_conll(const AnnotatedDocument& doc, const TagScheme& scheme) {
  const auto proj = spans_to_iob(doc, scheme);
  ConllDocument out;
  out.doc_id = doc.doc_id;
  for (std::size_t s = 0; s < proj.labels.size(); ++s) {
    LabeledSentence ls;
    const auto [b, e] = doc.tokenized.sentence_tokens[s];
    for (auto t = b; t < e; ++t) {
      ls.tokens.push_back(doc.tokens()[t].text);
      ls.labels.push_back(scheme.label(proj.labels[s][t - b]));
    }
    out.sentences.push_back(std::move(ls));
  }
  return out;
}

}  // namespace medtl::corpus
