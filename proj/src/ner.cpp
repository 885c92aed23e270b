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

#include "medtl/ner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::ner {

namespace {

using corpus::LabeledSentence;
using num::Graph;
using num::Tensor;
using num::Var;

std::string word_key(const NerModel& m, const std::string& token) {
  return m.config.lowercase_words ? text::ascii_lower(token) : token;
}

std::vector<int> gold_tags(const NerModel& m, const LabeledSentence& s) {
  if (s.labels.size() != s.tokens.size())
    throw ParseError("sentence has " + std::to_string(s.tokens.size()) + " tokens but " +
                     std::to_string(s.labels.size()) + " labels");
  std::vector<int> tags;
  tags.reserve(s.labels.size());
  for (const auto& l : s.labels) {
    const int id = m.scheme.id(l);
    if (id == corpus::TagScheme::kPad) throw SchemeError("PAD label on a real token");
    tags.push_back(id - 1);
  }
  return tags;
}

// Dropout never draws from the generator outside training.
Rng& rng_ref(Rng* r) {
  thread_local Rng unused(0);
  return r ? *r : unused;
}

bool uses_crf(const NerModel& m) { return m.config.architecture == Architecture::BilstmCrf; }

Tensor decode_transitions(const NerModel& m) {
  if (!m.config.iob_constraints) return m.crf.transitions.value;
  return crf::constrained(m.crf.transitions.value, crf::iob_constraint_mask(m.scheme));
}

std::vector<int> decode(const NerModel& m, const Tensor& e, const Tensor& trans) {
  if (uses_crf(m)) return crf::viterbi(e, trans).tags;
  std::vector<int> out(e.rows());
  for (std::size_t t = 0; t < e.rows(); ++t) {
    const auto row = e.row_span(t);
    out[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

// Loss of one sentence plus the number of units it averages over.
Var sentence_loss(Graph& g, NerModel& m, Var e, const std::vector<int>& tags) {
  if (uses_crf(m)) return crf::crf_nll(g, e, g.param(m.crf.transitions), tags);
  return g.pick_nll(g.log_softmax_rows(e), tags);
}

std::size_t loss_units(const NerModel& m, const LabeledSentence& s) {
  return uses_crf(m) ? 1 : s.tokens.size();
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

const char* architecture_name(Architecture a) {
  return a == Architecture::BilstmCrf ? "bilstm-crf" : "cnn-bilstm";
}

Architecture parse_architecture(const std::string& s) {
  const std::string n = text::ascii_lower(s);
  if (n == "bilstm-crf" || n == "bilstm_crf") return Architecture::BilstmCrf;
  if (n == "cnn-bilstm" || n == "cnn_bilstm") return Architecture::CnnBilstm;
  throw UsageError("unknown architecture '" + s + "' (expected bilstm-crf or cnn-bilstm)");
}

const char* embedding_name(EmbeddingSource e) {
  switch (e) {
    case EmbeddingSource::OneHot:
      return "one-hot";
    case EmbeddingSource::RandomDense:
      return "random";
    case EmbeddingSource::Pretrained:
      return "pretrained";
  }
  return "?";
}

EmbeddingSource parse_embedding(const std::string& s) {
  const std::string n = text::ascii_lower(s);
  if (n == "one-hot" || n == "one_hot" || n == "onehot") return EmbeddingSource::OneHot;
  if (n == "random" || n == "random_dense" || n == "dense") return EmbeddingSource::RandomDense;
  if (n == "pretrained") return EmbeddingSource::Pretrained;
  throw UsageError("unknown embedding source '" + s + "' (expected one-hot, random or pretrained)");
}

NerConfig NerConfig::bilstm_crf() { return NerConfig{}; }

NerConfig NerConfig::cnn_bilstm() {
  NerConfig c;
  c.architecture = Architecture::CnnBilstm;
  c.lstm_units = 200;
  c.dropout = 0.5;
  c.recurrent_dropout = 0.25;
  c.batch_size = 32;
  c.learning_rate = 0.0105;
  c.optimizer = num::OptimizerKind::Nadam;
  return c;
}

void NerConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw UsageError(std::string("ner config: ") + name + " must be positive");
  };
  positive(word_dim, "word_dim");
  positive(lstm_units, "lstm_units");
  positive(batch_size, "batch_size");
  if (architecture == Architecture::BilstmCrf) positive(dense_units, "dense_units");
  if (architecture == Architecture::CnnBilstm) {
    positive(char_dim, "char_dim");
    positive(char_features, "char_features");
    positive(conv_width, "conv_width");
    positive(max_word_chars, "max_word_chars");
    if (embedding == EmbeddingSource::OneHot)
      throw UsageError("ner config: cnn-bilstm needs a dense word embedding");
  }
  for (double p : {dropout, recurrent_dropout}) {
    if (!(p >= 0.0 && p < 1.0)) throw UsageError("ner config: dropout must be in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw UsageError("ner config: learning_rate must be positive");
}

std::size_t NerConfig::concat_width() const { return char_features + word_dim + text::kCasingClassCount; }

NerVocabs build_vocabs(const std::vector<LabeledSentence>& train, const NerConfig& config) {
  NerVocabs v;
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      v.words.add(config.lowercase_words ? text::ascii_lower(t) : t);
      for (char32_t c : text::utf8_decode(t)) v.chars.add(c);
    }
  }
  v.words.freeze();
  return v;
}

NerVocabs pretrained_vocabs(embed::PretrainedVectors vectors, const std::vector<LabeledSentence>& train) {
  NerVocabs v;
  v.words = std::move(vectors.vocab);
  v.pretrained = std::move(vectors.table);
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      for (char32_t c : text::utf8_decode(t)) v.chars.add(c);
    }
  }
  return v;
}

std::vector<num::Parameter*> NerModel::parameters() {
  std::vector<num::Parameter*> out;
  if (word_emb) out.push_back(&word_emb->table);
  if (config.architecture == Architecture::CnnBilstm) {
    out.push_back(&char_emb);
    char_conv.collect(out);
  }
  fwd.collect(out);
  bwd.collect(out);
  if (config.architecture == Architecture::BilstmCrf) hidden.collect(out);
  output.collect(out);
  if (config.architecture == Architecture::BilstmCrf) out.push_back(&crf.transitions);
  return out;
}

std::size_t NerModel::parameter_count() const {
  std::size_t n = 0;
  if (word_emb) n += word_emb->table.size();
  if (config.architecture == Architecture::CnnBilstm) n += char_emb.size() + char_conv.count();
  n += fwd.count() + bwd.count() + output.count();
  if (config.architecture == Architecture::BilstmCrf) n += hidden.count() + crf.count();
  return n;
}

namespace {

NerModel build_common(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme,
                      std::size_t lstm_input, Rng& rng) {
  NerModel m;
  m.config = config;
  m.scheme = scheme;
  m.vocabs = std::move(vocabs);
  const bool pretrained = config.embedding == EmbeddingSource::Pretrained;
  const bool trainable = config.train_embeddings.value_or(!pretrained);
  if (pretrained) {
    if (!m.vocabs.pretrained) throw UsageError("pretrained embedding source without loaded vectors");
    if (m.vocabs.pretrained->dim() != config.word_dim)
      throw UsageError("pretrained vectors have dimension " + std::to_string(m.vocabs.pretrained->dim()) +
                       ", config word_dim is " + std::to_string(config.word_dim));
    m.word_emb = *m.vocabs.pretrained;
    m.word_emb->table.name = "word_emb";
    m.word_emb->table.trainable = trainable;
    m.vocabs.pretrained.reset();
  } else if (config.embedding == EmbeddingSource::RandomDense) {
    m.word_emb = embed::EmbeddingTable::random("word_emb", m.vocabs.words.size(), config.word_dim, rng, trainable);
  }
  if (config.architecture == Architecture::CnnBilstm) {
    m.char_emb = num::Parameter("char_emb", num::uniform_tensor(m.vocabs.chars.size(), config.char_dim, -0.5, 0.5, rng));
    for (auto& x : m.char_emb.value.row_span(0)) x = 0.0;
    m.char_emb.freeze_row0 = true;
    m.char_conv = layers::ConvParams::init("char_conv", config.char_dim, config.char_features, config.conv_width, rng);
  }
  m.fwd = layers::LstmParams::init("lstm_fwd", lstm_input, config.lstm_units, rng);
  m.bwd = layers::LstmParams::init("lstm_bwd", lstm_input, config.lstm_units, rng);
  return m;
}

void check_inputs(const NerVocabs& v, const corpus::TagScheme& scheme) {
  if (scheme.base_tags().empty()) throw UsageError("tag scheme has no entity tags");
  if (v.words.size() <= 2 && !v.pretrained) throw UsageError("word vocabulary is empty");
}

}  // namespace

NerModel build_bilstm_crf(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme) {
  if (config.architecture != Architecture::BilstmCrf) throw UsageError("config architecture is not bilstm-crf");
  config.validate();
  check_inputs(vocabs, scheme);
  Rng rng(config.seed);
  const std::size_t input =
      config.embedding == EmbeddingSource::OneHot ? vocabs.words.size() : config.word_dim;
  NerModel m = build_common(config, std::move(vocabs), scheme, input, rng);
  const std::size_t T = m.num_tags();
  m.hidden = layers::DenseParams::init("hidden", 2 * config.lstm_units, config.dense_units, rng);
  m.output = layers::DenseParams::init("output", config.dense_units, T, rng);
  m.crf = crf::CrfParams::init("crf", T, rng);
  return m;
}

NerModel build_cnn_bilstm(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme) {
  if (config.architecture != Architecture::CnnBilstm) throw UsageError("config architecture is not cnn-bilstm");
  config.validate();
  check_inputs(vocabs, scheme);
  Rng rng(config.seed);
  NerModel m = build_common(config, std::move(vocabs), scheme, config.concat_width(), rng);
  m.output = layers::DenseParams::init("output", 2 * config.lstm_units, m.num_tags(), rng);
  return m;
}

NerModel build_ner(const NerConfig& config, NerVocabs vocabs, const corpus::TagScheme& scheme) {
  return config.architecture == Architecture::BilstmCrf ? build_bilstm_crf(config, std::move(vocabs), scheme)
                                                        : build_cnn_bilstm(config, std::move(vocabs), scheme);
}

Var emissions(Graph& g, NerModel& m, const std::vector<std::string>& tokens, bool training, Rng* rng) {
  const std::size_t L = tokens.size();
  if (L == 0) throw ShapeError("emissions for an empty sentence");
  if (training && !rng) throw UsageError("training forward pass needs an rng");
  const auto& cfg = m.config;
  std::vector<int> ids(L);
  for (std::size_t t = 0; t < L; ++t) ids[t] = m.vocabs.words.id(word_key(m, tokens[t]));

  Var words;
  if (m.word_emb) {
    words = embed::lookup(g, *m.word_emb, ids);
  } else {
    Tensor oh(L, m.vocabs.words.size());
    for (std::size_t t = 0; t < L; ++t) oh(t, static_cast<std::size_t>(ids[t])) = 1.0;
    words = g.constant(std::move(oh));
  }

  layers::RecurrentOptions ropt{cfg.recurrent_dropout, training, rng};
  if (cfg.architecture == Architecture::BilstmCrf) {
    const Var x = g.dropout(words, cfg.dropout, training, rng_ref(rng));
    const Var h = layers::bilstm(g, x, m.fwd, m.bwd, ropt);
    const Var d = layers::dense(g, h, m.hidden, layers::Activation::Tanh);
    return layers::dense(g, d, m.output, layers::Activation::Identity);
  }

  const Var cw = g.param(m.char_conv.W);
  const Var cb = g.param(m.char_conv.b);
  std::vector<Var> char_feats;
  char_feats.reserve(L);
  Tensor casing(L, text::kCasingClassCount);
  for (std::size_t t = 0; t < L; ++t) {
    const std::size_t n = std::clamp<std::size_t>(text::utf8_length(tokens[t]), 1, cfg.max_word_chars);
    const auto cids = text::char_ids(tokens[t], m.vocabs.chars, n);
    Var ce = g.gather_rows(m.char_emb, cids);
    ce = g.dropout(ce, cfg.dropout, training, rng_ref(rng));
    char_feats.push_back(layers::conv1d_maxpool(g, ce, cw, cb, m.char_conv.width, layers::Activation::Tanh));
    casing(t, static_cast<std::size_t>(text::casing_class(tokens[t]))) = 1.0;
  }
  const Var parts[3] = {g.concat_rows(char_feats), words, g.constant(std::move(casing))};
  const Var x = g.concat_cols(parts);
  const Var h = layers::bilstm(g, x, m.fwd, m.bwd, ropt);
  return layers::dense(g, h, m.output, layers::Activation::Identity);
}


// ---------------------------------------------------------------------------
// Training

namespace {

struct SentenceResult {
  double loss = 0.0;
  std::size_t correct = 0;
};

SentenceResult run_sentence(NerModel& m, const LabeledSentence& s, bool training, Rng* rng, double scale,
                            const Tensor* decode_trans) {
  const auto tags = gold_tags(m, s);
  Graph g(training);
  const Var e = emissions(g, m, s.tokens, training, rng);
  const Var loss = sentence_loss(g, m, e, tags);
  SentenceResult r;
  r.loss = g.value(loss)[0];
  if (!std::isfinite(r.loss)) throw NumericError("non-finite loss");
  const auto pred = decode(m, g.value(e), decode_trans ? *decode_trans : m.crf.transitions.value);
  for (std::size_t t = 0; t < tags.size(); ++t) r.correct += pred[t] == tags[t];
  if (training) g.backward(g.scale(loss, scale));
  return r;
}

std::vector<std::vector<std::size_t>> make_batches(const std::vector<LabeledSentence>& data,
                                                   std::size_t batch_size, Rng& rng) {
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  // Bucket by length; the shuffle above decides ties.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data[a].tokens.size() < data[b].tokens.size();
  });
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t i = 0; i < order.size(); i += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), i + batch_size)));
  }
  rng.shuffle(batches);
  return batches;
}

std::vector<Tensor> snapshot(const std::vector<num::Parameter*>& params) {
  std::vector<Tensor> out;
  out.reserve(params.size());
  for (const auto* p : params) out.push_back(p->value);
  return out;
}

std::size_t token_count(const std::vector<LabeledSentence>& data) {
  std::size_t n = 0;
  for (const auto& s : data) n += s.tokens.size();
  return n;
}

}  // namespace

std::string TrainingHistory::to_csv() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << "epoch,train_loss,train_acc,val_loss,val_acc\n";
  for (const auto& e : epochs)
    out << e.epoch << ',' << e.train_loss << ',' << e.train_acc << ',' << e.val_loss << ',' << e.val_acc << '\n';
  return out.str();
}

std::pair<double, double> evaluate_ner(NerModel& m, const std::vector<LabeledSentence>& data) {
  double loss = 0.0;
  std::size_t units = 0, correct = 0, tokens = 0;
  const Tensor trans = uses_crf(m) ? decode_transitions(m) : Tensor();
  for (const auto& s : data) {
    if (s.tokens.empty()) continue;
    const auto r = run_sentence(m, s, false, nullptr, 1.0, uses_crf(m) ? &trans : nullptr);
    loss += r.loss;
    correct += r.correct;
    units += loss_units(m, s);
    tokens += s.tokens.size();
  }
  return {units ? loss / static_cast<double>(units) : 0.0,
          tokens ? static_cast<double>(correct) / static_cast<double>(tokens) : 0.0};
}

TrainingHistory train_ner(NerModel& m, const std::vector<LabeledSentence>& train_all,
                          const std::vector<LabeledSentence>& val, const TrainOptions& opts) {
  TrainingHistory history;
  if (m.config.max_epochs == 0) return history;
  std::vector<LabeledSentence> train;
  for (const auto& s : train_all) {
    if (!s.tokens.empty()) train.push_back(s);
  }
  if (train.empty()) throw UsageError("train_ner: no training sentences");

  auto params = m.parameters();
  num::Optimizer opt({m.config.optimizer, m.config.learning_rate});
  Rng rng(m.config.seed ^ 0x9e3779b97f4a7c15ULL);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_values = snapshot(params);
  std::size_t since_best = 0;
  const std::size_t n_tokens = token_count(train);

  for (std::size_t epoch = 1; epoch <= m.config.max_epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t units = 0, correct = 0;
    const auto batches = make_batches(train, m.config.batch_size, rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      try {
        num::zero_grads(params);
        std::size_t batch_units = 0;
        for (auto i : batches[b]) batch_units += loss_units(m, train[i]);
        const double scale = 1.0 / static_cast<double>(batch_units);
        for (auto i : batches[b]) {
          const auto r = run_sentence(m, train[i], true, &rng, scale, nullptr);
          loss_sum += r.loss;
          correct += r.correct;
        }
        units += batch_units;
        if (m.config.clip_norm > 0) num::clip_global_norm(params, m.config.clip_norm);
        opt.step(params);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b + 1) + ")");
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(units);
    rec.train_acc = static_cast<double>(correct) / static_cast<double>(n_tokens);
    if (!val.empty()) std::tie(rec.val_loss, rec.val_acc) = evaluate_ner(m, val);
    history.epochs.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);

    const double monitored = val.empty() ? rec.train_loss : rec.val_loss;
    if (monitored < best) {
      best = monitored;
      history.best_epoch = epoch;
      best_values = snapshot(params);
      since_best = 0;
      if (!opts.checkpoint_path.empty()) save_ner(m, opts.checkpoint_path);
    } else if (++since_best >= m.config.patience) {
      history.stopped_early = epoch < m.config.max_epochs;
      break;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  num::zero_grads(params);
  return history;
}

// ---------------------------------------------------------------------------
// Inference

std::vector<std::string> predict_sentence(NerModel& m, const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  Graph g(false);
  const Var e = emissions(g, m, tokens, false, nullptr);
  const auto tags = decode(m, g.value(e), uses_crf(m) ? decode_transitions(m) : Tensor());
  std::vector<std::string> out;
  out.reserve(tags.size());
  for (int t : tags) out.push_back(m.scheme.label(t + 1));
  return out;
}

std::vector<std::vector<std::string>> predict_tags(NerModel& m, const corpus::AnnotatedDocument& doc) {
  std::vector<std::vector<std::string>> out;
  const auto& tok = doc.tokenized;
  for (const auto& [b, e] : tok.sentence_tokens) {
    std::vector<std::string> words;
    for (auto i = b; i < e; ++i) words.push_back(tok.tokens[i].text);
    out.push_back(predict_sentence(m, words));
  }
  return out;
}

std::vector<LabeledSentence> labeled_sentences(const std::vector<corpus::AnnotatedDocument>& docs,
                                               const corpus::TagScheme& scheme) {
  std::vector<LabeledSentence> out;
  for (const auto& d : docs) {
    for (auto& s : corpus::to_conll(d, scheme).sentences) {
      if (!s.tokens.empty()) out.push_back(std::move(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints

num::Checkpoint to_checkpoint(NerModel& m) {
  num::Checkpoint ck;
  const auto& c = m.config;
  ck.meta["kind"] = "ner";
  ck.meta["architecture"] = architecture_name(c.architecture);
  ck.meta["embedding"] = embedding_name(c.embedding);
  ck.meta["word_dim"] = std::to_string(c.word_dim);
  ck.meta["char_dim"] = std::to_string(c.char_dim);
  ck.meta["char_features"] = std::to_string(c.char_features);
  ck.meta["conv_width"] = std::to_string(c.conv_width);
  ck.meta["max_word_chars"] = std::to_string(c.max_word_chars);
  ck.meta["lstm_units"] = std::to_string(c.lstm_units);
  ck.meta["dense_units"] = std::to_string(c.dense_units);
  ck.meta["dropout"] = fmt(c.dropout);
  ck.meta["recurrent_dropout"] = fmt(c.recurrent_dropout);
  ck.meta["batch_size"] = std::to_string(c.batch_size);
  ck.meta["max_epochs"] = std::to_string(c.max_epochs);
  ck.meta["learning_rate"] = fmt(c.learning_rate);
  ck.meta["optimizer"] = num::optimizer_name(c.optimizer);
  ck.meta["clip_norm"] = fmt(c.clip_norm);
  ck.meta["patience"] = std::to_string(c.patience);
  ck.meta["lowercase_words"] = c.lowercase_words ? "1" : "0";
  ck.meta["train_embeddings"] = c.train_embeddings ? (*c.train_embeddings ? "1" : "0") : "";
  ck.meta["iob_constraints"] = c.iob_constraints ? "1" : "0";
  ck.meta["seed"] = std::to_string(c.seed);
  ck.meta["tags"] = join(m.scheme.base_tags(), '\n');
  ck.meta["words"] = join(m.vocabs.words.words(), '\n');
  ck.meta["chars"] = text::utf8_encode(m.vocabs.chars.chars());
  for (auto* p : m.parameters()) ck.put(p->name, p->value);
  return ck;
}

NerModel from_checkpoint(const num::Checkpoint& ck) {
  if (ck.require("kind") != "ner") throw ParseError("checkpoint is not an ner model");
  auto num = [&](const char* k) { return static_cast<std::size_t>(std::stoull(ck.require(k))); };
  auto real = [&](const char* k) { return std::stod(ck.require(k)); };
  NerConfig c;
  try {
    c.architecture = parse_architecture(ck.require("architecture"));
    c.embedding = parse_embedding(ck.require("embedding"));
    c.word_dim = num("word_dim");
    c.char_dim = num("char_dim");
    c.char_features = num("char_features");
    c.conv_width = num("conv_width");
    c.max_word_chars = num("max_word_chars");
    c.lstm_units = num("lstm_units");
    c.dense_units = num("dense_units");
    c.dropout = real("dropout");
    c.recurrent_dropout = real("recurrent_dropout");
    c.batch_size = num("batch_size");
    c.max_epochs = num("max_epochs");
    c.learning_rate = real("learning_rate");
    c.optimizer = num::parse_optimizer(ck.require("optimizer"));
    c.clip_norm = real("clip_norm");
    c.patience = num("patience");
    c.lowercase_words = ck.require("lowercase_words") == "1";
    const auto& te = ck.require("train_embeddings");
    if (!te.empty()) c.train_embeddings = te == "1";
    c.iob_constraints = ck.require("iob_constraints") == "1";
    c.seed = std::stoull(ck.require("seed"));
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("bad ner checkpoint metadata: ") + e.what());
  } catch (const UsageError& e) {
    throw ParseError(std::string("bad ner checkpoint metadata: ") + e.what());
  }

  NerVocabs v;
  v.words = embed::Vocab::from_words(split(ck.require("words"), '\n'));
  v.chars = text::CharVocab::from_chars(text::utf8_decode(ck.require("chars")));
  if (c.embedding == EmbeddingSource::Pretrained) {
    v.pretrained = embed::EmbeddingTable::from_matrix("word_emb", ck.get("word_emb"), false);
  }
  const corpus::TagScheme scheme(split(ck.require("tags"), '\n'));
  NerModel m = build_ner(c, std::move(v), scheme);
  for (auto* p : m.parameters()) {
    const Tensor& t = ck.get(p->name);
    if (!t.same_shape(p->value))
      throw ParseError("checkpoint tensor '" + p->name + "' has shape " + t.shape_str() + ", model expects " +
                       p->value.shape_str());
    p->value = t;
  }
  return m;
}

void save_ner(NerModel& m, const std::string& path) { to_checkpoint(m).save(path); }

NerModel load_ner(const std::string& path) { return from_checkpoint(num::Checkpoint::load(path)); }

}  // namespace medtl::ner
