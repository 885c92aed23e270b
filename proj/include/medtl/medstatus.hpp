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

// Medication status rules over (date REL medication) relations.
//
// The direction matters: rel(admission) = AFTER reads "the admission date is
// after the medication", i.e. the medication was already running. Feeding
// relations oriented the other way silently negates rule 1.

#ifndef MEDTL_MEDSTATUS_HPP
#define MEDTL_MEDSTATUS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "medtl/corpus.hpp"

namespace medtl::medstatus {

using corpus::Relation;

/// "YYYY-MM-DD" or "YYYY-MM" for MM/DD/YYYY, YYYY-MM-DD, "Month YYYY" and
/// "Month DD, YYYY" (full or three-letter month names); nullopt otherwise.
/// Never throws.
std::optional<std::string> normalize_date(std::string_view surface);

/// Negative, zero or positive when a is earlier, the same or later; nullopt
/// when the two cannot be ordered (one is a month that contains the other day).
std::optional<int> compare_dates(const std::string& a, const std::string& b);

/// Date expressions in the document text, tagged DATE, in document order.
std::vector<corpus::EntitySpan> find_dates(const corpus::AnnotatedDocument& doc);

struct Anchor {
  corpus::EntitySpan span;
  std::optional<std::string> normalized;
};

struct AnchorDates {
  std::optional<Anchor> admission;
  std::optional<Anchor> discharge;
  std::vector<std::string> warnings;
};

/// Binds each "Admission Date" / "Discharge Date" header (case-insensitive,
/// colon optional) to the nearest date in `dates` that starts after it and
/// before the next header. The first bound header of each kind wins.
AnchorDates find_anchor_dates(const corpus::AnnotatedDocument& doc, const std::vector<corpus::EntitySpan>& dates);

struct DatedRelation {
  corpus::EntitySpan date;
  Relation relation = Relation::Overlap;  // date REL medication
};

enum class Status { InUse, NotInUse };
const char* status_name(Status s);  // ON / OFF

struct StatusDecision {
  Status status = Status::NotInUse;
  int rule = 4;  // 1, 2, 3 or 4
  bool insufficient_anchor = false;
  bool textual_fallback = false;  // rule 3 ordered some date by text position
};

/// Rules 1-3 in order, rule 4 otherwise. Intermediate dates are those
/// strictly between the anchors by normalized date, or by text position when
/// a date does not normalize.
StatusDecision medication_status(const std::vector<DatedRelation>& relations, const AnchorDates& anchors);

struct MedStatusRecord {
  std::size_t id = 0;
  std::string event;
  Status status = Status::NotInUse;
  std::string start = "Unknown";
  std::string stop = "Unknown";
  bool operator==(const MedStatusRecord&) const = default;
};

/// ON: start is the earliest non-anchor OVERLAP/AFTER date (the admission
/// date when there is none), stop the earliest later non-anchor BEFORE date;
/// a known stop adds an OFF row from the stop date. OFF: one row starting at
/// the earliest non-anchor BEFORE date. Ids are left at zero.
std::vector<MedStatusRecord> derive_records(const std::string& event, const std::vector<DatedRelation>& relations,
                                            const AnchorDates& anchors, const StatusDecision& decision);

/// Header "ID,Event,Status,Start,Stop"; ids are id_base, id_base + 1, ...
std::string emit_table(const std::vector<MedStatusRecord>& records, std::size_t id_base);
/// Same records, one JSON object per line.
std::string emit_jsonl(const std::vector<MedStatusRecord>& records, std::size_t id_base);
/// Inverse of emit_table. Throws ParseError with line numbers.
std::vector<MedStatusRecord> parse_table(std::string_view csv);

}  // namespace medtl::medstatus

#endif  // MEDTL_MEDSTATUS_HPP
