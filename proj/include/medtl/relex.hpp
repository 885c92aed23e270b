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

// Event/time relation candidates and the encoder + CNN relation classifier.
// Labels are always oriented as (time REL event).

#ifndef MEDTL_RELEX_HPP
#define MEDTL_RELEX_HPP

#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "medtl/corpus.hpp"
#include "medtl/embed.hpp"
#include "medtl/layers.hpp"
#include "medtl/ner.hpp"
#include "medtl/num/checkpoint.hpp"
#include "medtl/num/optim.hpp"

namespace medtl::relex {

using corpus::Relation;

constexpr std::size_t kNumRelations = 3;

/// Reserved ids of every relation vocabulary.
enum ReservedToken : int {
  kPad = 0,
  kUnk = 1,
  kCls = 2,
  kSep = 3,
  kEventOpen = 4,
  kEventClose = 5,
  kTimeOpen = 6,
  kTimeClose = 7,
};
constexpr int kReservedCount = 8;

/// Empty vocabulary holding only the reserved entries (not frozen).
embed::Vocab reserved_vocab();
/// Reserved entries plus every lowercased token of `docs`, frozen.
embed::Vocab build_relation_vocab(const std::vector<corpus::AnnotatedDocument>& docs);

struct RelationInstance {
  std::string doc_id;
  corpus::EntitySpan event;
  corpus::EntitySpan time;
  /// [CLS] event sentence [SEP] (time sentence [SEP]), spans wrapped in markers.
  std::vector<int> token_ids;
  /// 0 up to the first [SEP], 1 after it.
  std::vector<int> segment_ids;
  std::optional<Relation> label;
  bool operator==(const RelationInstance&) const = default;
};

struct CandidateOptions {
  /// Largest sentence distance between the event and the time.
  std::size_t window = 2;
  std::size_t max_len = 128;
  /// Only events with these tags; empty means all.
  std::set<std::string> event_tags;
  /// Only timexes with these tags; empty means all.
  std::set<std::string> time_tags;
  /// Timex ids paired with every event regardless of the window.
  std::set<std::string> anchor_ids;
};

struct CandidateSet {
  std::vector<RelationInstance> instances;
  std::size_t skipped_overflow = 0;
  std::vector<std::string> warnings;
};

/// One instance per (event, time) pair of `doc`, in document order of the
/// event and then the time. Pairs whose context exceeds max_len are skipped
/// and counted.
CandidateSet generate_candidates(const corpus::AnnotatedDocument& doc, const embed::Vocab& vocab,
                                 const CandidateOptions& opts = {});

/// Exactly n_per_class instances of each relation, shuffled. Throws
/// UsageError on unlabeled input and RangeError when a class is short, unless
/// `with_replacement` is set.
std::vector<RelationInstance> downsample_balanced(const std::vector<RelationInstance>& instances,
                                                  std::size_t n_per_class, std::uint64_t seed,
                                                  bool with_replacement = false);

std::array<std::size_t, kNumRelations> class_counts(const std::vector<RelationInstance>& instances);

/// Single-sentence documents whose relation is fixed by a trigger word.
std::vector<corpus::AnnotatedDocument> separable_relation_documents(std::size_t n_per_class,
                                                                    std::uint64_t seed);

/// Tab-separated: doc_id, event, time, label ("-" when absent), token ids.
/// Spans are written id|start_token|end_token|start_char|end_char|tag|surface.
std::string write_instances(const std::vector<RelationInstance>& instances);
std::vector<RelationInstance> read_instances(std::string_view text);

// ---------------------------------------------------------------------------

struct RelConfig {
  layers::EncoderConfig encoder;  // vocab_size is filled in at build time
  std::array<std::size_t, 3> kernel_widths{2, 3, 4};
  std::size_t filters = 32;
  double encoder_dropout = 0.1;
  double head_dropout = 0.5;
  std::size_t epochs = 5;
  double learning_rate = 1e-3;
  num::OptimizerKind optimizer = num::OptimizerKind::Adam;
  std::size_t batch_size = 16;
  double clip_norm = 5.0;
  std::size_t patience = 5;
  std::size_t n_per_class = 3000;
  std::uint64_t seed = 1;

  /// Throws UsageError on repeated or zero kernel widths, widths above
  /// encoder.max_len and dropout outside [0, 1).
  void validate() const;
};

struct RelModel {
  RelConfig config;
  embed::Vocab vocab;
  layers::EncoderParams encoder;
  std::array<layers::ConvParams, 3> convs;
  layers::DenseParams head;

  std::vector<num::Parameter*> parameters();
  std::size_t parameter_count() const;
};

RelModel build_rel(const RelConfig& config, embed::Vocab vocab);

/// 1 x 3 logits in class order AFTER, OVERLAP, BEFORE.
num::Var relation_logits(num::Graph& g, RelModel& model, const RelationInstance& inst, bool training, Rng* rng);

/// Cross-entropy training on the labeled instances; unlabeled ones are
/// skipped. Early stopping and best-epoch restore as for the taggers.
ner::TrainingHistory train_rel(RelModel& model, const std::vector<RelationInstance>& train,
                               const std::vector<RelationInstance>& val, const ner::TrainOptions& opts = {});

/// Mean loss and accuracy over the labeled instances.
std::pair<double, double> evaluate_rel(RelModel& model, const std::vector<RelationInstance>& data);

struct Classification {
  Relation label = Relation::After;
  std::array<double, kNumRelations> probabilities{};
};

/// Argmax of the softmax; ties go to the earlier class (AFTER, OVERLAP, BEFORE).
Classification classify_relation(RelModel& model, const RelationInstance& inst);
Relation argmax_relation(const std::array<double, kNumRelations>& probabilities);

num::Checkpoint to_checkpoint(RelModel& model);
RelModel from_checkpoint(const num::Checkpoint& ck);
void save_rel(RelModel& model, const std::string& path);
RelModel load_rel(const std::string& path);

}  // namespace medtl::relex

#endif  // MEDTL_RELEX_HPP
