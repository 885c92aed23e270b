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

#include "medtl/medstatus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <regex>
#include <tuple>

#include "json.hpp"
#include "medtl/error.hpp"
#include "medtl/textproc.hpp"

namespace medtl::medstatus {

namespace {

using corpus::AnnotatedDocument;
using corpus::EntitySpan;

constexpr std::array<const char*, 12> kMonths = {"january", "february", "march",     "april",   "may",      "june",
                                                 "july",    "august",   "september", "october", "november", "december"};

const char* kMonthPattern =
    "(January|February|March|April|May|June|July|August|September|October|November|December|"
    "Jan|Feb|Mar|Apr|Jun|Jul|Aug|Sep|Sept|Oct|Nov|Dec)\\.?";

int month_number(std::string name) {
  name = text::ascii_lower(name);
  if (!name.empty() && name.back() == '.') name.pop_back();
  if (name == "sept") name = "sep";
  for (std::size_t i = 0; i < kMonths.size(); ++i) {
    if (name == kMonths[i] || (name.size() == 3 && std::string_view(kMonths[i]).substr(0, 3) == name))
      return static_cast<int>(i) + 1;
  }
  return 0;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

bool valid_day(int y, int m, int d) {
  static constexpr int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12 || d < 1) return false;
  return d <= days[m - 1] + (m == 2 && leap(y) ? 1 : 0);
}

std::optional<std::string> ymd(int y, int m, int d) {
  if (y < 1000 || y > 9999 || !valid_day(y, m, d)) return std::nullopt;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

std::optional<std::string> ym(int y, int m) {
  if (y < 1000 || y > 9999 || m < 1 || m > 12) return std::nullopt;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02d", y, m);
  return std::string(buf);
}

struct Patterns {
  std::regex numeric{"(\\d{1,2})/(\\d{1,2})/(\\d{4})"};
  std::regex iso{"(\\d{4})-(\\d{2})-(\\d{2})"};
  std::regex month_day_year{std::string(kMonthPattern) + "\\s+(\\d{1,2}),?\\s+(\\d{4})", std::regex::icase};
  std::regex month_year{std::string(kMonthPattern) + "\\s+(\\d{4})", std::regex::icase};
  std::regex header{"\\b(admission|discharge)\\s+date\\b\\s*:?", std::regex::icase};
};

const Patterns& patterns() {
  static const Patterns p;
  return p;
}

std::optional<std::string> normalize_match(const std::smatch& m, int kind) {
  auto num = [&](int i) { return std::stoi(m[i].str()); };
  switch (kind) {
    case 0: return ymd(num(3), num(1), num(2));
    case 1: return ymd(num(1), num(2), num(3));
    case 2: return ymd(num(3), month_number(m[1].str()), num(2));
    default: return ym(num(2), month_number(m[1].str()));
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool same_span(const EntitySpan& a, const EntitySpan& b) {
  return a.start_token == b.start_token && a.end_token == b.end_token;
}

std::optional<Relation> relation_to(const std::vector<DatedRelation>& rels, const std::optional<Anchor>& anchor) {
  if (!anchor) return std::nullopt;
  for (const auto& r : rels) {
    if (same_span(r.date, anchor->span)) return r.relation;
  }
  return std::nullopt;
}

bool is_anchor(const EntitySpan& s, const AnchorDates& a) {
  return (a.admission && same_span(s, a.admission->span)) || (a.discharge && same_span(s, a.discharge->span));
}

// Sort key: normalized dates first in date order, the rest by text position.
// Month-only dates sort before the days of that month.
auto order_key(const EntitySpan& s) {
  const auto n = normalize_date(s.surface);
  std::string key = n ? *n : std::string();
  if (key.size() == 7) key += "-00";
  return std::make_tuple(!n.has_value(), key, s.start_char);
}

// Strictly after `pivot` by date, or by text position when either side does
// not normalize.
bool later_than(const EntitySpan& s, const EntitySpan& pivot) {
  const auto a = normalize_date(s.surface), b = normalize_date(pivot.surface);
  if (a && b) {
    const auto c = compare_dates(*a, *b);
    return c && *c > 0;
  }
  return s.start_char > pivot.start_char;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::optional<std::string> normalize_date(std::string_view surface) {
  try {
    const std::string s = trim(surface);
    const auto& p = patterns();
    const std::regex* order[] = {&p.numeric, &p.iso, &p.month_day_year, &p.month_year};
    std::smatch m;
    for (int k = 0; k < 4; ++k) {
      if (std::regex_match(s, m, *order[k])) return normalize_match(m, k);
    }
  } catch (...) {
  }
  return std::nullopt;
}

std::optional<int> compare_dates(const std::string& a, const std::string& b) {
  const std::size_t n = std::min(a.size(), b.size());
  const int c = a.compare(0, n, b, 0, n);
  if (c != 0) return c < 0 ? -1 : 1;
  if (a.size() == b.size()) return 0;
  return std::nullopt;
}

std::vector<EntitySpan> find_dates(const AnnotatedDocument& doc) {
  const auto& p = patterns();
  const std::regex* order[] = {&p.month_day_year, &p.numeric, &p.iso, &p.month_year};
  struct Hit {
    std::size_t begin, end;
  };
  std::vector<Hit> hits;
  const std::string& t = doc.text;
  for (const auto* re : order) {
    for (auto it = std::sregex_iterator(t.begin(), t.end(), *re); it != std::sregex_iterator(); ++it) {
      const auto b = static_cast<std::size_t>(it->position(0));
      const auto e = b + static_cast<std::size_t>(it->length(0));
      if ((b > 0 && is_word_char(t[b - 1])) || (e < t.size() && is_word_char(t[e]))) continue;
      if (!normalize_date(it->str(0))) continue;
      // Earlier patterns are longer; keep the first hit over any overlap.
      const bool overlaps = std::any_of(hits.begin(), hits.end(), [&](const Hit& h) { return b < h.end && h.begin < e; });
      if (!overlaps) hits.push_back({b, e});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.begin < b.begin; });
  std::vector<EntitySpan> out;
  for (const auto& h : hits) {
    const std::size_t cb = text::utf8_length(std::string_view(t).substr(0, h.begin));
    const std::size_t ce = cb + text::utf8_length(std::string_view(t).substr(h.begin, h.end - h.begin));
    out.push_back(corpus::span_from_chars(doc, "DATE", cb, ce, "D" + std::to_string(out.size())));
  }
  return out;
}

AnchorDates find_anchor_dates(const AnnotatedDocument& doc, const std::vector<EntitySpan>& dates) {
  AnchorDates a;
  const std::string& t = doc.text;
  struct Header {
    bool admission;
    std::size_t end_char, begin_char;
  };
  std::vector<Header> headers;
  for (auto it = std::sregex_iterator(t.begin(), t.end(), patterns().header); it != std::sregex_iterator(); ++it) {
    const auto b = static_cast<std::size_t>(it->position(0));
    const auto e = b + static_cast<std::size_t>(it->length(0));
    headers.push_back({text::ascii_lower((*it)[1].str()) == "admission",
                       text::utf8_length(std::string_view(t).substr(0, e)),
                       text::utf8_length(std::string_view(t).substr(0, b))});
  }
  std::vector<const EntitySpan*> sorted;
  for (const auto& d : dates) sorted.push_back(&d);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EntitySpan* x, const EntitySpan* y) { return x->start_char < y->start_char; });

  for (std::size_t h = 0; h < headers.size(); ++h) {
    const auto& hd = headers[h];
    const char* name = hd.admission ? "Admission Date" : "Discharge Date";
    const std::size_t limit = h + 1 < headers.size() ? headers[h + 1].begin_char : SIZE_MAX;
    const EntitySpan* bound = nullptr;
    for (const auto* d : sorted) {
      if (d->start_char >= hd.end_char && d->start_char < limit) {
        bound = d;
        break;
      }
    }
    if (!bound) {
      a.warnings.push_back(std::string(name) + " header without a following date");
      continue;
    }
    auto& slot = hd.admission ? a.admission : a.discharge;
    if (slot) {
      a.warnings.push_back(std::string("repeated ") + name + " header; keeping '" + slot->span.surface +
                           "', ignoring '" + bound->surface + "'");
      continue;
    }
    slot = Anchor{*bound, normalize_date(bound->surface)};
  }
  if (a.admission && a.discharge && a.admission->normalized && a.discharge->normalized) {
    const auto c = compare_dates(*a.admission->normalized, *a.discharge->normalized);
    if (c && *c > 0)
      a.warnings.push_back("admission date " + a.admission->span.surface + " is after discharge date " +
                           a.discharge->span.surface);
  }
  return a;
}

const char* status_name(Status s) { return s == Status::InUse ? "ON" : "OFF"; }

StatusDecision medication_status(const std::vector<DatedRelation>& rels, const AnchorDates& anchors) {
  const auto adm = relation_to(rels, anchors.admission);
  const auto dis = relation_to(rels, anchors.discharge);
  const bool dis_ok = dis && (*dis == Relation::Before || *dis == Relation::Overlap);
  StatusDecision d;
  if (adm == Relation::After && dis_ok) {
    d = {Status::InUse, 1, false, false};
    return d;
  }
  if (adm == Relation::Overlap && dis == Relation::Overlap) {
    d = {Status::InUse, 2, false, false};
    return d;
  }
  if (dis_ok && anchors.admission && anchors.discharge) {
    for (const auto& r : rels) {
      if (r.relation != Relation::Overlap || is_anchor(r.date, anchors)) continue;
      const auto n = normalize_date(r.date.surface);
      const auto& lo = anchors.admission->normalized;
      const auto& hi = anchors.discharge->normalized;
      bool between = false;
      if (n && lo && hi) {
        const auto a = compare_dates(*n, *lo), b = compare_dates(*n, *hi);
        between = a && b && *a > 0 && *b < 0;
      } else {
        d.textual_fallback = true;
        between = r.date.start_char > anchors.admission->span.start_char &&
                  r.date.start_char < anchors.discharge->span.start_char;
      }
      if (between) {
        d.status = Status::InUse;
        d.rule = 3;
        return d;
      }
    }
  }
  d.status = Status::NotInUse;
  d.rule = 4;
  d.insufficient_anchor = !anchors.admission || !anchors.discharge || !adm || !dis;
  return d;
}

std::vector<MedStatusRecord> derive_records(const std::string& event, const std::vector<DatedRelation>& rels,
                                            const AnchorDates& anchors, const StatusDecision& decision) {
  std::vector<const DatedRelation*> dated;
  for (const auto& r : rels) {
    if (!is_anchor(r.date, anchors)) dated.push_back(&r);
  }
  std::stable_sort(dated.begin(), dated.end(), [](const DatedRelation* a, const DatedRelation* b) {
    return order_key(a->date) < order_key(b->date);
  });
  auto first = [&](auto pred) -> const DatedRelation* {
    for (const auto* r : dated) {
      if (pred(*r)) return r;
    }
    return nullptr;
  };

  MedStatusRecord rec;
  rec.event = event;
  if (decision.status == Status::NotInUse) {
    rec.status = Status::NotInUse;
    if (const auto* b = first([](const DatedRelation& r) { return r.relation == Relation::Before; }))
      rec.start = b->date.surface;
    return {rec};
  }

  rec.status = Status::InUse;
  const EntitySpan* start = nullptr;
  if (const auto* s = first([](const DatedRelation& r) { return r.relation != Relation::Before; })) {
    start = &s->date;
  } else if (anchors.admission) {
    const auto adm = relation_to(rels, anchors.admission);
    if (adm && *adm != Relation::Before) start = &anchors.admission->span;
  }
  if (start) rec.start = start->surface;
  const auto* stop = first([&](const DatedRelation& r) {
    return r.relation == Relation::Before && (!start || later_than(r.date, *start));
  });
  if (!stop) return {rec};
  rec.stop = stop->date.surface;
  MedStatusRecord off;
  off.event = event;
  off.status = Status::NotInUse;
  off.start = stop->date.surface;
  return {rec, off};
}

std::string emit_table(const std::vector<MedStatusRecord>& records, std::size_t id_base) {
  std::string out = "ID,Event,Status,Start,Stop\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    out += std::to_string(id_base + i) + ',' + csv_field(r.event) + ',' + status_name(r.status) + ',' +
           csv_field(r.start) + ',' + csv_field(r.stop) + '\n';
  }
  return out;
}

std::string emit_jsonl(const std::vector<MedStatusRecord>& records, std::size_t id_base) {
  std::string out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    nlohmann::ordered_json j;
    j["ID"] = id_base + i;
    j["Event"] = r.event;
    j["Status"] = status_name(r.status);
    j["Start"] = r.start;
    j["Stop"] = r.stop;
    out += j.dump() + '\n';
  }
  return out;
}

std::vector<MedStatusRecord> parse_table(std::string_view csv) {
  // RFC-4180 records: quoted fields may hold commas, quotes and newlines.
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t line = 1, row_line = 1;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row_lines.push_back(row_line);
    row.clear();
  };
  for (std::size_t i = 0; i < csv.size(); ++i) {
    const char c = csv[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < csv.size() && csv[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < csv.size() && csv[i + 1] == '\n') ++i;
      end_row();
      row_line = ++line;
    } else if (c == '"') {
      throw ParseError("stray quote inside an unquoted field", line);
    } else {
      field += c;
      field_started = true;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field", line);
  if (field_started || !row.empty()) end_row();

  if (rows.empty()) throw ParseError("missing header", 1);
  if (rows[0] != std::vector<std::string>{"ID", "Event", "Status", "Start", "Stop"})
    throw ParseError("header must be ID,Event,Status,Start,Stop", 1);
  std::vector<MedStatusRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r];
    const std::size_t ln = row_lines[r];
    if (f.size() != 5) throw ParseError("expected 5 fields, found " + std::to_string(f.size()), ln);
    MedStatusRecord rec;
    try {
      std::size_t used = 0;
      rec.id = std::stoull(f[0], &used);
      if (used != f[0].size()) throw std::invalid_argument(f[0]);
    } catch (const std::logic_error&) {
      throw ParseError("bad ID '" + f[0] + "'", ln);
    }
    rec.event = f[1];
    if (f[2] == "ON") rec.status = Status::InUse;
    else if (f[2] == "OFF") rec.status = Status::NotInUse;
    else throw ParseError("status must be ON or OFF, got '" + f[2] + "'", ln);
    rec.start = f[3];
    rec.stop = f[4];
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace medtl::medstatus
