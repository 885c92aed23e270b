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

#ifndef MEDTL_NER_HPP
#define MEDTL_NER_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "medtl/corpus.hpp"
#include "medtl/crf.hpp"
#include "medtl/embed.hpp"
#include "medtl/layers.hpp"
#include "medtl/num/checkpoint.hpp"
#include "medtl/num/optim.hpp"
#include "medtl/textproc.hpp"

namespace medtl::ner {

enum class Architecture { BilstmCrf, CnnBilstm };
enum class EmbeddingSource { OneHot, RandomDense, Pretrained };

const char* architecture_name(Architecture a);
Architecture parse_architecture(const std::string& s);
const char* embedding_name(EmbeddingSource e);
EmbeddingSource parse_embedding(const std::string& s);

struct NerConfig {
  Architecture architecture = Architecture::BilstmCrf;
  EmbeddingSource embedding = EmbeddingSource::RandomDense;
  std::size_t word_dim = 50;
  std::size_t char_dim = 30;
  std::size_t char_features = 30;
  std::size_t conv_width = 3;
  std::size_t max_word_chars = 30;
  std::size_t lstm_units = 50;
  std::size_t dense_units = 100;
  /// Embedding dropout for BiLSTM-CRF, character-embedding dropout for CNN-BiLSTM.
  double dropout = 0.2;
  double recurrent_dropout = 0.0;
  std::size_t batch_size = 256;
  std::size_t max_epochs = 30;
  double learning_rate = 1e-4;
  num::OptimizerKind optimizer = num::OptimizerKind::Adam;
  double clip_norm = 5.0;
  std::size_t patience = 5;
  bool lowercase_words = true;
  /// Unset: trainable when randomly initialised, frozen when pretrained.
  std::optional<bool> train_embeddings;
  bool iob_constraints = false;
  std::uint64_t seed = 1;

  static NerConfig bilstm_crf();
  static NerConfig cnn_bilstm();
  /// Throws UsageError on non-positive sizes or dropout outside [0, 1).
  void validate() const;
  /// Width of the per-token CNN-BiLSTM input: char features + word dim + casing classes.
  std::size_t concat_width() const;
};

struct NerVocabs {
  embed::Vocab words;
  text::CharVocab chars;
  /// Rows aligned with `words` when the embedding source is pretrained.
  std::optional<embed::EmbeddingTable> pretrained;
};

/// Word and character vocabularies over the training sentences (frozen).
NerVocabs build_vocabs(const std::vector<corpus::LabeledSentence>& train, const NerConfig& config);
/// Word vocabulary and table from a vector file, characters from `train`.
NerVocabs pretrained_vocabs(embed::PretrainedVectors vectors,
                            const std::vector<corpus::LabeledSentence>& train);

struct NerModel {
  NerConfig config;
  corpus::TagScheme scheme{std::vector<std::string>{}};
  NerVocabs vocabs;

  std::optional<embed::EmbeddingTable> word_emb;  // absent for one-hot input
  num::Parameter char_emb;
  layers::ConvParams char_conv;
  layers::LstmParams fwd, bwd;
  layers::DenseParams hidden;  // BiLSTM-CRF only
  layers::DenseParams output;
  crf::CrfParams crf;          // BiLSTM-CRF only

  std::vector<num::Parameter*> parameters();
  /// Entries of every parameter in the network (frozen embeddings included);
  /// for the CRF only the (T+1)^2 reachable transitions count.
  std::size_t parameter_count() const;
  std::size_t num_tags() const { return scheme.size() - 1; }
};

NerModel build_bilstm_crf(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme);
NerModel build_cnn_bilstm(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme);
/// Dispatches on config.architecture.
NerModel build_ner(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme);

/// Emission scores L x T for one sentence (T excludes PAD).
num::Var emissions(num::Graph& g, NerModel& model, const std::vector<std::string>& tokens, bool training,
                   Rng* rng);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based, 0 when nothing ran
  bool stopped_early = false;

  std::string to_csv() const;
};

struct TrainOptions {
  /// Best-epoch checkpoint, written whenever the monitored loss improves.
  std::string checkpoint_path;
  std::function<void(const EpochRecord&)> on_epoch;
};

/// Mini-batch training with length bucketing and early stopping on
/// validation loss (training loss when `val` is empty). The parameters of the
/// best epoch are restored before returning.
TrainingHistory train_ner(NerModel& model, const std::vector<corpus::LabeledSentence>& train,
                          const std::vector<corpus::LabeledSentence>& val, const TrainOptions& opts = {});

/// Loss and token accuracy over `data` in inference mode.
std::pair<double, double> evaluate_ner(NerModel& model, const std::vector<corpus::LabeledSentence>& data);

std::vector<std::string> predict_sentence(NerModel& model, const std::vector<std::string>& tokens);
/// One label sequence per sentence of the document.
std::vector<std::vector<std::string>> predict_tags(NerModel& model, const corpus::AnnotatedDocument& doc);

num::Checkpoint to_checkpoint(NerModel& model);
NerModel from_checkpoint(const num::Checkpoint& ck);
void save_ner(NerModel& model, const std::string& path);
NerModel load_ner(const std::string& path);

/// Every labelled sentence of the documents, projected with `scheme`.
std::vector<corpus::LabeledSentence> labeled_sentences(const std::vector<corpus::AnnotatedDocument>& docs,
                                                       const corpus::TagScheme& scheme);

}  // namespace medtl::ner

#endif  // MEDTL_NER_HPP
