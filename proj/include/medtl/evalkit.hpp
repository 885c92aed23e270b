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

#ifndef MEDTL_EVALKIT_HPP
#define MEDTL_EVALKIT_HPP

#include <map>
#include <string>
#include <vector>

#include "medtl/corpus.hpp"

namespace medtl::evalkit {

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
  std::size_t support = 0;  // tp + fn
  bool operator==(const Counts&) const = default;
};

struct Confusion {
  std::vector<std::string> labels;
  std::vector<Counts> counts;  // aligned with labels
  std::size_t correct = 0;
  std::size_t total = 0;
  bool padding_included = false;

  /// Counts of `label`; zeros when absent.
  Counts of(const std::string& label) const;
  /// Adds other's counts; labels new to this one are appended.
  void merge(const Confusion& other);
};

/// Token-level exact match. `labels` fixes the report order; labels seen in
/// the data but not listed are appended in order of appearance. Positions
/// whose gold label is `pad_label` are skipped unless include_padding.
/// Throws UsageError on length mismatch.
Confusion confusion_counts(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                           const std::vector<std::string>& labels = {}, bool include_padding = false,
                           const std::string& pad_label = "PAD");
/// Sentence-wise version of the above.
Confusion sentence_confusion(const std::vector<std::vector<std::string>>& gold,
                           const std::vector<std::vector<std::string>>& pred,
                           const std::vector<std::string>& labels = {}, bool include_padding = false,
                           const std::string& pad_label = "PAD");

struct Prf {
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// 0/0 counts as 0.
Prf prf(std::size_t tp, std::size_t fp, std::size_t fn);

struct LabelMetrics {
  std::string label;
  Prf metrics;
  std::size_t support = 0;
};

struct EvalReport {
  std::vector<LabelMetrics> labels;
  double accuracy = 0.0;
  Prf macro, weighted;
  std::size_t total_support = 0;
  bool padding_included = false;
};

/// Macro: unweighted mean over the listed labels. Weighted: support-weighted
/// mean. Accuracy: correct / total.
EvalReport aggregate(const std::vector<LabelMetrics>& labels, std::size_t correct, std::size_t total);
EvalReport aggregate(const Confusion& c);

struct SpanReport {
  std::map<std::string, Counts> per_tag;
  std::map<std::string, Prf> per_tag_metrics;
  Counts overall;
  Prf overall_metrics;
};

/// A predicted span is a true positive iff tag and both token boundaries
/// match a gold span not matched before.
SpanReport span_prf(const std::vector<corpus::EntitySpan>& gold, const std::vector<corpus::EntitySpan>& pred);

/// Aligned text table: per-label rows, then accuracy, macro avg and
/// weighted avg. Metrics are printed x100 with two decimals.
struct ConllEvaluation {
  EvalReport tokens;
  SpanReport spans;
};

/// Token-level and span-level scores of `pred` against `gold`. Documents,
/// sentences and tokens must line up; throws RangeError otherwise.
ConllEvaluation evaluate_conll(const std::vector<corpus::ConllDocument>& gold,
                               const std::vector<corpus::ConllDocument>& pred, bool include_padding = false);

std::string format_table(const EvalReport& r);
std::string to_json(const EvalReport& r);
std::string to_json(const SpanReport& r);

}  // namespace medtl::evalkit

#endif  // MEDTL_EVALKIT_HPP
