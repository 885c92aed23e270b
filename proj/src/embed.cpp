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

#include "medtl/embed.hpp"

#include <zlib.h>

#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::embed {

Vocab::Vocab() {
  words_ = {kPadWord, kUnkWord};
  ids_.emplace(kPadWord, kPad);
  ids_.emplace(kUnkWord, kUnk);
}

int Vocab::add(std::string_view word) {
  if (auto it = ids_.find(word); it != ids_.end()) return it->second;
  if (frozen_) throw std::logic_error("cannot add '" + std::string(word) + "' to a frozen vocabulary");
  const int id = static_cast<int>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(std::string(word), id);
  return id;
}

int Vocab::id(std::string_view word) const {
  auto it = ids_.find(word);
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocab::contains(std::string_view word) const { return ids_.find(word) != ids_.end(); }

const std::string& Vocab::word(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= words_.size())
    throw RangeError("vocabulary id " + std::to_string(id) + " out of range");
  return words_[static_cast<std::size_t>(id)];
}

Vocab Vocab::from_words(const std::vector<std::string>& words) {
  if (words.size() < 2 || words[0] != kPadWord || words[1] != kUnkWord)
    throw ParseError("vocabulary must start with <pad>, <unk>");
  Vocab v;
  for (std::size_t i = 2; i < words.size(); ++i) {
    if (v.add(words[i]) != static_cast<int>(i)) throw ParseError("duplicate vocabulary word '" + words[i] + "'");
  }
  v.freeze();
  return v;
}

num::Tensor one_hot(std::size_t id, std::size_t n) {
  if (id >= n) throw RangeError("one_hot: id " + std::to_string(id) + " >= n " + std::to_string(n));
  num::Tensor t(1, n);
  t[id] = 1.0;
  return t;
}

std::vector<double> bow_vector(std::span<const std::string> tokens, const Vocab& vocab) {
  if (!vocab.frozen()) throw UsageError("bow_vector needs a frozen vocabulary");
  std::vector<double> counts(vocab.size(), 0.0);
  for (const auto& t : tokens) counts[static_cast<std::size_t>(vocab.id(t))] += 1.0;
  return counts;
}

EmbeddingTable EmbeddingTable::random(std::string name, std::size_t vocab_size, std::size_t dim,
                                      Rng& rng, bool trainable) {
  num::Tensor m = num::uniform_tensor(vocab_size, dim, -0.05, 0.05, rng);
  return from_matrix(std::move(name), std::move(m), trainable);
}

EmbeddingTable EmbeddingTable::from_matrix(std::string name, num::Tensor m, bool trainable) {
  if (m.rows() > 0) {
    for (auto& x : m.row_span(0)) x = 0.0;
  }
  EmbeddingTable t{num::Parameter(std::move(name), std::move(m), trainable)};
  t.table.freeze_row0 = true;
  return t;
}

num::Var lookup(num::Graph& g, EmbeddingTable& table, std::span<const int> ids) {
  return g.gather_rows(table.table, ids);
}

PretrainedVectors parse_pretrained(std::string_view text, std::size_t expected_dim) {
  if (expected_dim == 0) throw UsageError("expected_dim must be positive");
  PretrainedVectors out;
  std::vector<double> values;  // row-major, loaded words only
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::vector<std::string> f;
    for (std::string w; fields >> w;) f.push_back(std::move(w));
    if (f.empty()) continue;

    if (lineno == 1 && f.size() == 2) {
      char* end = nullptr;
      std::strtoull(f[0].c_str(), &end, 10);
      const bool count_ok = *end == '\0';
      const unsigned long long dim = std::strtoull(f[1].c_str(), &end, 10);
      if (count_ok && *end == '\0') {
        if (dim != expected_dim)
          throw ParseError("header dimension " + f[1] + " != expected " + std::to_string(expected_dim), lineno);
        continue;
      }
    }
    if (f.size() != expected_dim + 1)
      throw ParseError("expected " + std::to_string(expected_dim) + " values, got " +
                           std::to_string(f.size() - 1),
                       lineno);
    if (out.vocab.contains(f[0])) {
      ++out.skipped_duplicates;
      continue;
    }
    for (std::size_t k = 1; k < f.size(); ++k) {
      char* end = nullptr;
      const double v = std::strtod(f[k].c_str(), &end);
      if (*end != '\0') throw ParseError("bad number '" + f[k] + "'", lineno);
      values.push_back(v);
    }
    out.vocab.add(f[0]);
  }
  out.vocab.freeze();

  const std::size_t n_loaded = out.vocab.size() - 2;
  num::Tensor m(out.vocab.size(), expected_dim);
  for (std::size_t r = 0; r < n_loaded; ++r) {
    for (std::size_t c = 0; c < expected_dim; ++c) {
      const double v = values[r * expected_dim + c];
      m(r + 2, c) = v;
      m(Vocab::kUnk, c) += v / static_cast<double>(n_loaded);
    }
  }
  out.table = EmbeddingTable::from_matrix("word_embedding", std::move(m), false);
  return out;
}

PretrainedVectors load_pretrained(const std::string& path, std::size_t expected_dim) {
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw Error(ErrorKind::Data, "cannot open vector file " + path);
  std::string text;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
  const bool failed = n < 0;
  gzclose(f);
  if (failed) throw Error(ErrorKind::Data, "error decompressing " + path);
  return parse_pretrained(text, expected_dim);
}

}  // namespace medtl::embed
