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

// Checkpoint container. Layout (all integers little-endian):
//
//   "MEDTLCK\0"  u32 version
//   u32 n_meta   { u32 len, key bytes, u32 len, value bytes } * n_meta
//   u32 n_tensor { u32 len, name bytes, u8 dtype (1 = f64, 2 = f32),
//                  u32 rank, u64 dims[rank], data } * n_tensor
//
// Metadata is written in key order and tensors in insertion order, so the
// output is byte-stable for fixed inputs.

#ifndef MEDTL_NUM_CHECKPOINT_HPP
#define MEDTL_NUM_CHECKPOINT_HPP

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "medtl/num/tensor.hpp"

namespace medtl::num {

class Checkpoint {
 public:
  static constexpr std::uint32_t kVersion = 1;

  std::map<std::string, std::string> meta;

  void put(std::string name, Tensor t);
  bool has(std::string_view name) const;
  /// Throws ParseError when missing.
  const Tensor& get(std::string_view name) const;
  const std::vector<std::pair<std::string, Tensor>>& tensors() const { return tensors_; }

  /// Meta lookup that throws ParseError when the key is absent.
  const std::string& require(const std::string& key) const;

  std::string serialize() const;
  static Checkpoint parse(std::string_view bytes);

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);

 private:
  std::vector<std::pair<std::string, Tensor>> tensors_;
};

}  // namespace medtl::num

#endif  // MEDTL_NUM_CHECKPOINT_HPP
