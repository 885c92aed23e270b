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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "medtl/corpus.hpp"
#include "medtl/crf.hpp"
#include "medtl/error.hpp"
#include "medtl/ner.hpp"

using namespace medtl;
using namespace medtl::ner;
using corpus::LabeledSentence;
using corpus::TagScheme;

namespace {

NerVocabs tiny_vocabs(std::size_t n_words) {
  NerVocabs v;
  for (std::size_t i = 0; v.words.size() < n_words; ++i) v.words.add("w" + std::to_string(i));
  v.words.freeze();
  return v;
}

NerConfig tiny_config() {
  NerConfig c = NerConfig::bilstm_crf();
  c.word_dim = 4;
  c.lstm_units = 3;
  c.dense_units = 5;
  return c;
}

// Small models with a step size that converges in a handful of epochs.
NerConfig overfit_config(Architecture a) {
  NerConfig c = a == Architecture::BilstmCrf ? NerConfig::bilstm_crf() : NerConfig::cnn_bilstm();
  c.word_dim = 16;
  c.lstm_units = 16;
  c.dense_units = 16;
  c.char_dim = 8;
  c.char_features = 8;
  c.batch_size = 5;
  c.learning_rate = 0.01;
  c.max_epochs = 30;
  c.patience = 30;
  c.seed = 7;
  return c;
}

NerModel overfit_model(Architecture a, const std::vector<LabeledSentence>& data) {
  const NerConfig c = overfit_config(a);
  return build_ner(c, build_vocabs(data, c), TagScheme::i2b2_2009());
}

double token_accuracy(NerModel& m, const std::vector<LabeledSentence>& data) {
  std::size_t ok = 0, n = 0;
  for (const auto& s : data) {
    const auto pred = predict_sentence(m, s.tokens);
    for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == s.labels[i];
    n += s.tokens.size();
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

bool equal(const num::Tensor& a, const num::Tensor& b) {
  return a.same_shape(b) && std::ranges::equal(a.data(), b.data());
}

bool same_values(NerModel& a, NerModel& b) {
  auto pa = a.parameters();
  auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i]->name != pb[i]->name || !equal(pa[i]->value, pb[i]->value)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("tiny BiLSTM-CRF parameter count matches closed form") {
  const TagScheme scheme({"x"});  // O, B-x, I-x: three tags
  NerModel m = build_bilstm_crf(tiny_config(), tiny_vocabs(10), scheme);
  REQUIRE(m.num_tags() == 3);
  const std::size_t V = 10, d = 4, h = 3, D = 5, T = 3;
  const std::size_t expected = V * d + 2 * (d * 4 * h + h * 4 * h + 4 * h) + (2 * h * D + D) + (D * T + T) +
                               (T + 1) * (T + 1);
  CHECK(expected == 301);
  CHECK(m.parameter_count() == expected);
}

TEST_CASE("same config and seed give identical initial parameters") {
  const TagScheme scheme({"x"});
  NerModel a = build_bilstm_crf(tiny_config(), tiny_vocabs(10), scheme);
  NerModel b = build_bilstm_crf(tiny_config(), tiny_vocabs(10), scheme);
  CHECK(same_values(a, b));
  NerConfig other = tiny_config();
  other.seed = 2;
  NerModel c = build_bilstm_crf(other, tiny_vocabs(10), scheme);
  CHECK_FALSE(same_values(a, c));
}

TEST_CASE("config validation") {
  NerConfig c = tiny_config();
  c.dropout = 1.0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = tiny_config();
  c.lstm_units = 0;
  CHECK_THROWS_AS(c.validate(), UsageError);
  c = NerConfig::cnn_bilstm();
  c.embedding = EmbeddingSource::OneHot;
  CHECK_THROWS_AS(c.validate(), UsageError);
  CHECK_THROWS_AS(build_cnn_bilstm(tiny_config(), tiny_vocabs(10), TagScheme({"x"})), UsageError);
  CHECK_THROWS_AS(build_bilstm_crf(tiny_config(), tiny_vocabs(10), TagScheme(std::vector<std::string>{})),
                  UsageError);
  CHECK_THROWS_AS(parse_architecture("lstm"), UsageError);
  CHECK(parse_embedding("one-hot") == EmbeddingSource::OneHot);
}

TEST_CASE("CNN-BiLSTM concat width and defaults") {
  NerConfig c = NerConfig::cnn_bilstm();
  CHECK(c.concat_width() == c.char_features + c.word_dim + text::kCasingClassCount);
  CHECK(c.concat_width() == 86);
  c.char_features = 24;
  CHECK(c.concat_width() == 80);
  CHECK(NerConfig::cnn_bilstm().optimizer == num::OptimizerKind::Nadam);
  CHECK(NerConfig::bilstm_crf().optimizer == num::OptimizerKind::Adam);

  const auto data = corpus::separable_ner_fixture(5, 1);
  NerModel m = build_cnn_bilstm(c, build_vocabs(data, c), TagScheme::i2b2_2009());
  CHECK(m.fwd.input_dim() == 80);
  num::Graph g(false);
  const auto e = emissions(g, m, data[0].tokens, false, nullptr);
  CHECK(g.value(e).rows() == data[0].tokens.size());
  CHECK(g.value(e).cols() == TagScheme::i2b2_2009().size() - 1);
}

TEST_CASE("one-hot input feeds the vocabulary width") {
  NerConfig c = tiny_config();
  c.embedding = EmbeddingSource::OneHot;
  NerModel m = build_bilstm_crf(c, tiny_vocabs(10), TagScheme({"x"}));
  CHECK_FALSE(m.word_emb.has_value());
  CHECK(m.fwd.input_dim() == 10);
  const auto tags = predict_sentence(m, {"w3", "w4", "unseen"});
  CHECK(tags.size() == 3);
}

TEST_CASE("zero epochs leave the model unchanged") {
  const auto data = corpus::separable_ner_fixture(10, 3);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  NerModel before = m;
  m.config.max_epochs = 0;
  const auto h = train_ner(m, data, {});
  CHECK(h.epochs.empty());
  CHECK(h.best_epoch == 0);
  CHECK(same_values(m, before));
}

TEST_CASE("predictions have one label per token and never PAD") {
  const auto data = corpus::separable_ner_fixture(10, 4);
  for (auto a : {Architecture::BilstmCrf, Architecture::CnnBilstm}) {
    NerModel m = overfit_model(a, data);
    for (const auto& s : data) {
      const auto pred = predict_sentence(m, s.tokens);
      REQUIRE(pred.size() == s.tokens.size());
      for (const auto& l : pred) CHECK(l != "PAD");
      CHECK(predict_sentence(m, s.tokens) == pred);
    }
    const auto empty = corpus::make_document("empty", "");
    CHECK(predict_tags(m, empty).empty());
    CHECK(predict_sentence(m, {}).empty());
  }
}

TEST_CASE("predict_tags follows the document's sentences") {
  const auto doc = corpus::make_document("d", "He took aspirin daily.\nThen heparin.\n");
  const auto data = corpus::separable_ner_fixture(10, 4);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  const auto tags = predict_tags(m, doc);
  REQUIRE(tags.size() == doc.tokenized.sentence_tokens.size());
  for (std::size_t s = 0; s < tags.size(); ++s) {
    const auto [b, e] = doc.tokenized.sentence_tokens[s];
    CHECK(tags[s].size() == e - b);
  }
}

TEST_CASE("decoded path scores at least the gold path") {
  const auto data = corpus::separable_ner_fixture(20, 5);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  const auto& scheme = m.scheme;
  for (const auto& s : data) {
    num::Graph g(false);
    const auto e = g.value(emissions(g, m, s.tokens, false, nullptr));
    std::vector<int> gold;
    for (const auto& l : s.labels) gold.push_back(scheme.id(l) - 1);
    const auto best = crf::viterbi(e, m.crf.transitions.value);
    CHECK(best.score >= crf::score_sequence(e, m.crf.transitions.value, gold) - 1e-12);
    CHECK(best.score == doctest::Approx(crf::score_sequence(e, m.crf.transitions.value, best.tags)));

    // Scaling emissions and transitions together keeps the argmax.
    num::Tensor e2 = e, t2 = m.crf.transitions.value;
    for (auto& x : e2.data()) x *= 3.5;
    for (auto& x : t2.data()) x *= 3.5;
    CHECK(crf::viterbi(e2, t2).tags == best.tags);
  }
}

TEST_CASE("overfit the separable fixture") {
  const auto data = corpus::separable_ner_fixture(50, 11);
  for (auto a : {Architecture::BilstmCrf, Architecture::CnnBilstm}) {
    const std::string arch = architecture_name(a);
    CAPTURE(arch);
    NerModel m = overfit_model(a, data);
    const auto h = train_ner(m, data, {});
    REQUIRE_FALSE(h.epochs.empty());
    CHECK(h.epochs.size() <= 30);
    double best_acc = 0.0;
    for (const auto& e : h.epochs) best_acc = std::max(best_acc, e.train_acc);
    const double acc = token_accuracy(m, data);
    MESSAGE(arch << " epochs=" << h.epochs.size() << " accuracy=" << acc);
    CHECK(acc >= 0.99);
    for (std::size_t i = 1; i < h.epochs.size(); ++i)
      CHECK(h.epochs[i].train_loss <= 1.1 * h.epochs[i - 1].train_loss + 1e-3);

    // Exact gold recovery once fitted.
    std::size_t exact = 0;
    for (const auto& s : data) exact += predict_sentence(m, s.tokens) == s.labels;
    CHECK(exact == data.size());

    // Same seed, same run.
    NerModel again = overfit_model(a, data);
    const auto h2 = train_ner(again, data, {});
    CHECK(h2.to_csv() == h.to_csv());
    CHECK(same_values(m, again));
  }
}

TEST_CASE("early stopping restores the best epoch") {
  const auto data = corpus::separable_ner_fixture(20, 12);
  const auto val = corpus::separable_ner_fixture(5, 13);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  m.config.learning_rate = 0.5;  // noisy on purpose
  m.config.patience = 2;
  m.config.max_epochs = 12;
  std::size_t seen = 0;
  TrainOptions opts;
  opts.on_epoch = [&](const EpochRecord& r) { CHECK(r.epoch == ++seen); };
  const auto h = train_ner(m, data, val, opts);
  CHECK(seen == h.epochs.size());
  REQUIRE(h.best_epoch >= 1);
  double best = 1e300;
  for (const auto& e : h.epochs) best = std::min(best, e.val_loss);
  CHECK(h.epochs[h.best_epoch - 1].val_loss == best);
  CHECK(evaluate_ner(m, val).first == doctest::Approx(best).epsilon(1e-12));
  if (h.stopped_early) CHECK(h.epochs.size() == h.best_epoch + 2);
  const std::string csv = h.to_csv();
  CHECK(csv.rfind("epoch,train_loss,train_acc,val_loss,val_acc\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == h.epochs.size() + 1);
}

TEST_CASE("bad labels are rejected") {
  auto data = corpus::separable_ner_fixture(5, 1);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  m.config.max_epochs = 1;
  data[0].labels[0] = "B-nope";
  CHECK_THROWS_AS(train_ner(m, data, {}), SchemeError);
  data[0].labels.pop_back();
  CHECK_THROWS_AS(train_ner(m, data, {}), ParseError);
}

TEST_CASE("checkpoint round trip") {
  const auto data = corpus::separable_ner_fixture(10, 21);
  for (auto a : {Architecture::BilstmCrf, Architecture::CnnBilstm}) {
    NerModel m = overfit_model(a, data);
    m.config.max_epochs = 2;
    const auto path = (std::filesystem::temp_directory_path() / "medtl_ner_ck.bin").string();
    TrainOptions opts;
    opts.checkpoint_path = path;
    train_ner(m, data, {}, opts);
    NerModel loaded = load_ner(path);
    CHECK(same_values(m, loaded));
    CHECK(loaded.config.architecture == a);
    CHECK(loaded.vocabs.words.words() == m.vocabs.words.words());
    CHECK(loaded.scheme.labels() == m.scheme.labels());
    for (const auto& s : data) CHECK(predict_sentence(loaded, s.tokens) == predict_sentence(m, s.tokens));
    std::remove(path.c_str());
  }
  num::Checkpoint bogus;
  bogus.meta["kind"] = "relation";
  CHECK_THROWS_AS(from_checkpoint(bogus), ParseError);
}

TEST_CASE("pretrained embeddings are frozen by default") {
  const auto data = corpus::separable_ner_fixture(10, 31);
  const auto vectors = embed::parse_pretrained("aspirin 1 0\nheparin 0 1\nthe 0.5 0.5\n", 2);
  NerConfig c = overfit_config(Architecture::BilstmCrf);
  c.embedding = EmbeddingSource::Pretrained;
  c.word_dim = 2;
  c.max_epochs = 2;
  NerModel m = build_ner(c, pretrained_vocabs(vectors, data), TagScheme::i2b2_2009());
  REQUIRE(m.word_emb.has_value());
  CHECK_FALSE(m.word_emb->table.trainable);
  const num::Tensor before = m.word_emb->table.value;
  train_ner(m, data, {});
  CHECK(equal(m.word_emb->table.value, before));

  c.word_dim = 3;
  CHECK_THROWS_AS(build_ner(c, pretrained_vocabs(vectors, data), TagScheme::i2b2_2009()), UsageError);
}

TEST_CASE("IOB constraints keep decoded sequences well formed") {
  const auto data = corpus::separable_ner_fixture(10, 41);
  NerModel m = overfit_model(Architecture::BilstmCrf, data);
  m.config.iob_constraints = true;
  for (const auto& s : data) {
    const auto pred = predict_sentence(m, s.tokens);
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i].rfind("I-", 0) != 0) continue;
      REQUIRE(i > 0);
      CHECK(pred[i - 1].substr(1) == pred[i].substr(1));
    }
  }
}
