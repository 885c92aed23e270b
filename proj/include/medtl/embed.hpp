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

#ifndef MEDTL_EMBED_HPP
#define MEDTL_EMBED_HPP

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medtl/num/graph.hpp"
#include "medtl/num/tensor.hpp"

namespace medtl {
class Rng;
}

namespace medtl::embed {

/// Word <-> id bijection with PAD = 0 and UNK = 1 always present.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr const char* kPadWord = "<pad>";
  static constexpr const char* kUnkWord = "<unk>";

  Vocab();

  /// Returns the existing id for known words. Throws std::logic_error once frozen.
  int add(std::string_view word);
  /// UNK for unknown words.
  int id(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& word(int id) const;
  std::size_t size() const { return words_.size(); }

  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  /// All words in id order, reserved entries included.
  const std::vector<std::string>& words() const { return words_; }
  /// Inverse of words(); the result is frozen.
  static Vocab from_words(const std::vector<std::string>& words);

 private:
  std::vector<std::string> words_;
  std::map<std::string, int, std::less<>> ids_;
  bool frozen_ = false;
};

/// 1 x n unit row e_id. Throws RangeError when id >= n.
num::Tensor one_hot(std::size_t id, std::size_t n);

/// Count of each vocabulary id over `tokens`; out-of-vocabulary words count
/// towards UNK. Requires a frozen vocabulary (UsageError otherwise).
std::vector<double> bow_vector(std::span<const std::string> tokens, const Vocab& vocab);

/// |vocab| x d table whose PAD row is zero and never updated.
struct EmbeddingTable {
  num::Parameter table;

  std::size_t dim() const { return table.value.cols(); }
  std::size_t rows() const { return table.value.rows(); }

  /// Uniform(-0.05, 0.05) rows, PAD row zero.
  static EmbeddingTable random(std::string name, std::size_t vocab_size, std::size_t dim, Rng& rng,
                               bool trainable = true);
  static EmbeddingTable from_matrix(std::string name, num::Tensor m, bool trainable);
};

/// Stacked rows for `ids` (0 x d for no ids); gradients accumulate per row.
num::Var lookup(num::Graph& g, EmbeddingTable& table, std::span<const int> ids);

struct PretrainedVectors {
  Vocab vocab;
  EmbeddingTable table;
  std::size_t skipped_duplicates = 0;
};

/// "word v1 ... vd" lines with an optional "count dim" header line. Rows
/// follow file order after PAD and UNK; the UNK row is the mean of all loaded
/// vectors. Throws ParseError (with line number) on dimension mismatches.
PretrainedVectors parse_pretrained(std::string_view text, std::size_t expected_dim);
/// As parse_pretrained; gzip-compressed files are accepted.
PretrainedVectors load_pretrained(const std::string& path, std::size_t expected_dim);

}  // namespace medtl::embed

#endif  // MEDTL_EMBED_HPP
