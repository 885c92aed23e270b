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

// Run settings: flat key=value text with [ner], [rel], [extract] and
// [split] sections. Later assignments override earlier ones.
//
//   # comment
//   [ner]
//   architecture = cnn-bilstm
//   max_epochs = 10

#ifndef MEDTL_SETTINGS_HPP
#define MEDTL_SETTINGS_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "medtl/corpus.hpp"
#include "medtl/ner.hpp"
#include "medtl/pipeline.hpp"
#include "medtl/relex.hpp"

namespace medtl {

class Settings {
 public:
  /// Throws ParseError (with line) on malformed lines and UsageError on
  /// unknown sections or keys.
  void load_text(std::string_view text);
  void load_file(const std::string& path);

  /// `key` is "section.name". Throws UsageError on unknown keys.
  void set(const std::string& key, const std::string& value);
  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Sets ner.seed, rel.seed and split.seed.
  void set_seed(std::uint64_t seed);

  /// Starts from the preset of ner.architecture. Pretrained vectors are not
  /// loaded here; see ner.vectors.
  ner::NerConfig ner_config() const;
  /// "2009" (default) or "2012".
  const corpus::TagScheme& ner_scheme() const;
  relex::RelConfig rel_config() const;
  std::size_t rel_window() const;
  pipeline::ExtractOptions extract_options() const;
  corpus::SplitRatios split_ratios() const;
  std::uint64_t split_seed() const;

  /// Every known key, sorted.
  static const std::map<std::string, std::string>& known_keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace medtl

#endif  // MEDTL_SETTINGS_HPP
