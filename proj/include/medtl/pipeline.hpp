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

// End-to-end medication timeline extraction and corpus directories.

#ifndef MEDTL_PIPELINE_HPP
#define MEDTL_PIPELINE_HPP

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "medtl/corpus.hpp"
#include "medtl/medstatus.hpp"
#include "medtl/ner.hpp"
#include "medtl/relex.hpp"

namespace medtl::pipeline {

// ---------------------------------------------------------------------------
// Corpus directories: <id>.txt with optional <id>.xml (2012 events, timexes),
// <id>.tlink and <id>.med (2009 medication entries).

void write_corpus_dir(const std::vector<corpus::AnnotatedDocument>& docs, const std::string& dir);

struct CorpusDir {
  std::vector<corpus::AnnotatedDocument> docs;  // sorted by document id
  std::size_t warnings = 0;
};

/// Throws RangeError when `dir` is missing or has no .txt files.
CorpusDir read_corpus_dir(const std::string& dir, corpus::ParseOptions opts = {});

/// A single plain-text document, or every document of a directory.
CorpusDir read_inputs(const std::string& path, corpus::ParseOptions opts = {});

/// Calls fn(0) ... fn(n - 1) on up to `jobs` threads. The first exception
/// by index is rethrown after all calls finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

/// Predicted labels for every sentence of every document.
std::vector<corpus::ConllDocument> predict_corpus(ner::NerModel& model,
                                                  const std::vector<corpus::AnnotatedDocument>& docs,
                                                  std::size_t jobs = 1);

/// Candidates over the document's own events and timexes. Its admission and
/// discharge dates pair with every event.
relex::CandidateSet gold_candidates(const corpus::AnnotatedDocument& doc, const embed::Vocab& vocab,
                                    std::size_t window, std::size_t max_len);

// ---------------------------------------------------------------------------

struct ExtractOptions {
  std::size_t id_base = 1;
  /// Event tags treated as medications in gold mode.
  std::set<std::string> medication_tags{"TREATMENT"};
  /// Timex tags treated as dates in gold mode.
  std::set<std::string> date_tags{"DATE"};
  std::size_t window = 2;
  /// Worker threads for model inference. Results keep document order.
  std::size_t jobs = 1;
};

struct DocumentRecords {
  std::string doc_id;
  std::vector<medstatus::MedStatusRecord> records;
  std::vector<std::string> warnings;
};

struct Extraction {
  std::vector<DocumentRecords> documents;
  std::size_t id_base = 1;

  /// All records, ids assigned consecutively from id_base.
  std::vector<medstatus::MedStatusRecord> records() const;
  std::string csv() const;
  std::string jsonl() const;
};

/// Mentions sharing a lowercased surface are one medication, named after the
/// first mention. For each date the first relation seen wins.
std::vector<medstatus::MedStatusRecord> medication_records(
    const std::vector<std::pair<corpus::EntitySpan, std::vector<medstatus::DatedRelation>>>& mentions,
    const medstatus::AnchorDates& anchors, std::vector<std::string>& warnings);

/// Uses the document's own events, timexes and TLINKs. Dates come from
/// find_dates when the document has no date timexes.
DocumentRecords extract_gold(const corpus::AnnotatedDocument& doc, const ExtractOptions& opts = {});
Extraction extract_gold(const std::vector<corpus::AnnotatedDocument>& docs, const ExtractOptions& opts = {});

/// Medications from the tagger, dates from find_dates, relations from the
/// classifier. The tagger's medication tag is "m" or "TREATMENT",
/// whichever its scheme has.
DocumentRecords extract_with_models(const corpus::AnnotatedDocument& doc, ner::NerModel& ner_model,
                                    relex::RelModel& rel_model, const ExtractOptions& opts = {});
Extraction extract_with_models(const std::vector<corpus::AnnotatedDocument>& docs, ner::NerModel& ner_model,
                               relex::RelModel& rel_model, const ExtractOptions& opts = {});

/// Medication spans predicted for `doc`, in document token ordinals.
std::vector<corpus::EntitySpan> predict_medications(ner::NerModel& model, const corpus::AnnotatedDocument& doc);

}  // namespace medtl::pipeline

#endif  // MEDTL_PIPELINE_HPP
