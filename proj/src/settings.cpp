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

#include "medtl/settings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "medtl/error.hpp"
#include "medtl/textproc.hpp"

namespace medtl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw UsageError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

double to_real(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw UsageError(key + ": expected a number, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = text::ascii_lower(v);
  if (l == "true" || l == "1" || l == "yes" || l == "on") return true;
  if (l == "false" || l == "0" || l == "no" || l == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

}  // namespace

const std::map<std::string, std::string>& Settings::known_keys() {
  static const std::map<std::string, std::string> keys = {
      {"ner.architecture", "bilstm-crf or cnn-bilstm"},
      {"ner.scheme", "tag set: 2009 (medication fields) or 2012 (event types)"},
      {"ner.embedding", "one-hot, random or pretrained"},
      {"ner.vectors", "word vector text file for pretrained embeddings"},
      {"ner.word_dim", "word embedding size"},
      {"ner.char_dim", "character embedding size"},
      {"ner.char_features", "character CNN filters"},
      {"ner.conv_width", "character CNN width"},
      {"ner.max_word_chars", "characters kept per word"},
      {"ner.lstm_units", "LSTM units per direction"},
      {"ner.dense_units", "hidden dense units (BiLSTM-CRF)"},
      {"ner.dropout", "embedding dropout"},
      {"ner.recurrent_dropout", "recurrent dropout"},
      {"ner.batch_size", "sentences per batch"},
      {"ner.max_epochs", "epoch limit"},
      {"ner.learning_rate", "learning rate"},
      {"ner.optimizer", "adam or nadam"},
      {"ner.clip_norm", "global gradient norm limit"},
      {"ner.patience", "epochs without improvement before stopping"},
      {"ner.lowercase_words", "lowercase words before lookup"},
      {"ner.train_embeddings", "update the word embeddings"},
      {"ner.iob_constraints", "forbid O -> I-x transitions when decoding"},
      {"ner.seed", "initialisation and shuffling seed"},
      {"rel.hidden", "encoder width"},
      {"rel.heads", "attention heads"},
      {"rel.layers", "encoder layers"},
      {"rel.ffn", "feed-forward width"},
      {"rel.max_len", "longest input in tokens"},
      {"rel.kernel_widths", "three comma-separated convolution widths"},
      {"rel.filters", "filters per convolution"},
      {"rel.encoder_dropout", "dropout on the encoder output"},
      {"rel.head_dropout", "dropout before the classifier"},
      {"rel.epochs", "epoch limit"},
      {"rel.learning_rate", "learning rate"},
      {"rel.optimizer", "adam or nadam"},
      {"rel.batch_size", "instances per batch"},
      {"rel.clip_norm", "global gradient norm limit"},
      {"rel.patience", "epochs without improvement before stopping"},
      {"rel.n_per_class", "training instances per class after down-sampling"},
      {"rel.window", "largest sentence distance of a candidate pair"},
      {"rel.seed", "initialisation and shuffling seed"},
      {"extract.id_base", "first record id"},
      {"extract.window", "largest sentence distance of a candidate pair"},
      {"extract.medication_tags", "comma-separated event tags read as medications (gold mode)"},
      {"split.train", "training share"},
      {"split.val", "validation share"},
      {"split.test", "test share"},
      {"split.seed", "split seed"},
  };
  return keys;
}

void Settings::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw UsageError("unknown setting '" + key + "'");
  values_[key] = value;
}

std::optional<std::string> Settings::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void Settings::set_seed(std::uint64_t seed) {
  const std::string s = std::to_string(seed);
  for (const char* k : {"ner.seed", "rel.seed", "split.seed"}) values_[k] = s;
}

void Settings::load_text(std::string_view text) {
  std::string section;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", lineno);
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section != "ner" && section != "rel" && section != "extract" && section != "split")
        throw UsageError("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
    std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ParseError("empty key", lineno);
    if (key.find('.') == std::string::npos) {
      if (section.empty()) throw ParseError("key '" + key + "' outside a section", lineno);
      key = section + "." + key;
    }
    try {
      set(key, value);
    } catch (const UsageError& e) {
      throw UsageError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void Settings::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RangeError("cannot read settings file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ss.str());
}

ner::NerConfig Settings::ner_config() const {
  const auto arch = get("ner.architecture");
  ner::NerConfig c = arch && ner::parse_architecture(*arch) == ner::Architecture::CnnBilstm
                         ? ner::NerConfig::cnn_bilstm()
                         : ner::NerConfig::bilstm_crf();
  for (const auto& [key, v] : values_) {
    if (key.rfind("ner.", 0) != 0) continue;
    const std::string k = key.substr(4);
    if (k == "embedding") c.embedding = ner::parse_embedding(v);
    else if (k == "word_dim") c.word_dim = to_size(key, v);
    else if (k == "char_dim") c.char_dim = to_size(key, v);
    else if (k == "char_features") c.char_features = to_size(key, v);
    else if (k == "conv_width") c.conv_width = to_size(key, v);
    else if (k == "max_word_chars") c.max_word_chars = to_size(key, v);
    else if (k == "lstm_units") c.lstm_units = to_size(key, v);
    else if (k == "dense_units") c.dense_units = to_size(key, v);
    else if (k == "dropout") c.dropout = to_real(key, v);
    else if (k == "recurrent_dropout") c.recurrent_dropout = to_real(key, v);
    else if (k == "batch_size") c.batch_size = to_size(key, v);
    else if (k == "max_epochs") c.max_epochs = to_size(key, v);
    else if (k == "learning_rate") c.learning_rate = to_real(key, v);
    else if (k == "optimizer") c.optimizer = num::parse_optimizer(v);
    else if (k == "clip_norm") c.clip_norm = to_real(key, v);
    else if (k == "patience") c.patience = to_size(key, v);
    else if (k == "lowercase_words") c.lowercase_words = to_bool(key, v);
    else if (k == "train_embeddings") c.train_embeddings = to_bool(key, v);
    else if (k == "iob_constraints") c.iob_constraints = to_bool(key, v);
    else if (k == "seed") c.seed = to_size(key, v);
  }
  c.validate();
  return c;
}

const corpus::TagScheme& Settings::ner_scheme() const {
  const std::string s = get("ner.scheme").value_or("2009");
  if (s == "2009") return corpus::TagScheme::i2b2_2009();
  if (s == "2012") return corpus::TagScheme::i2b2_2012();
  throw UsageError("ner.scheme: expected 2009 or 2012, got '" + s + "'");
}

relex::RelConfig Settings::rel_config() const {
  relex::RelConfig c;
  for (const auto& [key, v] : values_) {
    if (key.rfind("rel.", 0) != 0) continue;
    const std::string k = key.substr(4);
    if (k == "hidden") c.encoder.hidden = to_size(key, v);
    else if (k == "heads") c.encoder.heads = to_size(key, v);
    else if (k == "layers") c.encoder.layers = to_size(key, v);
    else if (k == "ffn") c.encoder.ffn = to_size(key, v);
    else if (k == "max_len") c.encoder.max_len = to_size(key, v);
    else if (k == "filters") c.filters = to_size(key, v);
    else if (k == "encoder_dropout") c.encoder_dropout = to_real(key, v);
    else if (k == "head_dropout") c.head_dropout = to_real(key, v);
    else if (k == "epochs") c.epochs = to_size(key, v);
    else if (k == "learning_rate") c.learning_rate = to_real(key, v);
    else if (k == "optimizer") c.optimizer = num::parse_optimizer(v);
    else if (k == "batch_size") c.batch_size = to_size(key, v);
    else if (k == "clip_norm") c.clip_norm = to_real(key, v);
    else if (k == "patience") c.patience = to_size(key, v);
    else if (k == "n_per_class") c.n_per_class = to_size(key, v);
    else if (k == "seed") c.seed = to_size(key, v);
    else if (k == "kernel_widths") {
      std::istringstream in(v);
      std::size_t i = 0;
      for (std::string part; std::getline(in, part, ',');) {
        if (i == 3) throw UsageError(key + ": expected three widths");
        c.kernel_widths[i++] = to_size(key, trim(part));
      }
      if (i != 3) throw UsageError(key + ": expected three widths");
    }
  }
  c.validate();
  return c;
}

std::size_t Settings::rel_window() const {
  const auto v = get("rel.window");
  return v ? to_size("rel.window", *v) : relex::CandidateOptions{}.window;
}

pipeline::ExtractOptions Settings::extract_options() const {
  pipeline::ExtractOptions o;
  if (auto v = get("extract.id_base")) o.id_base = to_size("extract.id_base", *v);
  o.window = rel_window();
  if (auto v = get("extract.window")) o.window = to_size("extract.window", *v);
  if (auto v = get("extract.medication_tags")) {
    o.medication_tags.clear();
    std::istringstream in(*v);
    for (std::string part; std::getline(in, part, ',');) {
      if (!trim(part).empty()) o.medication_tags.insert(trim(part));
    }
  }
  return o;
}

corpus::SplitRatios Settings::split_ratios() const {
  corpus::SplitRatios r;
  if (auto v = get("split.train")) r.train = to_real("split.train", *v);
  if (auto v = get("split.val")) r.val = to_real("split.val", *v);
  if (auto v = get("split.test")) r.test = to_real("split.test", *v);
  return r;
}

std::uint64_t Settings::split_seed() const {
  const auto v = get("split.seed");
  return v ? to_size("split.seed", *v) : 1;
}

}  // namespace medtl
