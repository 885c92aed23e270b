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

#ifndef MEDTL_LAYERS_HPP
#define MEDTL_LAYERS_HPP

#include <span>
#include <string>
#include <vector>

#include "medtl/num/graph.hpp"
#include "medtl/num/tensor.hpp"

namespace medtl {
class Rng;
}

namespace medtl::layers {

using num::Graph;
using num::Parameter;
using num::Tensor;
using num::Var;

enum class Activation { Identity, Tanh, Relu, Softmax };

Var activate(Graph& g, Var x, Activation a);

// ---------------------------------------------------------------------------
// Dense

struct DenseParams {
  Parameter W;  // in x out
  Parameter b;  // 1 x out

  static DenseParams init(const std::string& name, std::size_t in, std::size_t out, Rng& rng);
  std::size_t in() const { return W.value.rows(); }
  std::size_t out() const { return W.value.cols(); }
  std::size_t count() const { return W.size() + b.size(); }
  void collect(std::vector<Parameter*>& out);
};

/// act(x W + b), row-wise.
Var dense(Graph& g, Var x, Var W, Var b, Activation act);
Var dense(Graph& g, Var x, DenseParams& p, Activation act);

// ---------------------------------------------------------------------------
// LSTM

/// Gate blocks are laid out [i | f | o | g] along the columns of W, U and b.
struct LstmParams {
  Parameter W;  // d x 4h
  Parameter U;  // h x 4h
  Parameter b;  // 1 x 4h

  /// Glorot-uniform weights, zero biases except +1 on the forget gate.
  static LstmParams init(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng& rng);
  std::size_t input_dim() const { return W.value.rows(); }
  std::size_t hidden() const { return U.value.rows(); }
  std::size_t count() const { return W.size() + U.size() + b.size(); }
  void collect(std::vector<Parameter*>& out);
};

struct LstmVars {
  Var W, U, b;
};
LstmVars bind(Graph& g, LstmParams& p);

struct LstmState {
  Var h;  // 1 x h
  Var c;  // 1 x h
};

/// One step from an already-projected input row xw = x W (1 x 4h).
LstmState lstm_step_projected(Graph& g, Var xw, const LstmState& prev, const LstmVars& v);
/// One step from a raw input row x (1 x d).
LstmState lstm_cell_step(Graph& g, Var x, const LstmState& prev, const LstmVars& v);

struct RecurrentOptions {
  double recurrent_dropout = 0.0;
  bool training = false;
  Rng* rng = nullptr;  // required when dropout is active
};

/// Runs over the rows of seq (L x d) from zero state; returns L x h in the
/// original row order. With reverse the sequence is consumed last row first.
Var lstm(Graph& g, Var seq, LstmParams& p, bool reverse, const RecurrentOptions& opt = {});
/// Row t = [forward h_t | backward h_t], L x 2h. Throws ShapeError when L == 0.
Var bilstm(Graph& g, Var seq, LstmParams& fwd, LstmParams& bwd, const RecurrentOptions& opt = {});

// ---------------------------------------------------------------------------
// Character CNN

struct ConvParams {
  Parameter W;  // (width * in) x filters
  Parameter b;  // 1 x filters
  std::size_t width = 3;

  static ConvParams init(const std::string& name, std::size_t in, std::size_t filters, std::size_t width,
                         Rng& rng);
  std::size_t filters() const { return W.value.cols(); }
  std::size_t count() const { return W.size() + b.size(); }
  void collect(std::vector<Parameter*>& out);
};

/// SAME-padded 1-D convolution over rows, L x filters.
Var conv1d(Graph& g, Var x, Var W, Var b, std::size_t width, Activation act);
/// conv1d followed by max over positions, 1 x filters.
Var conv1d_maxpool(Graph& g, Var x, Var W, Var b, std::size_t width, Activation act);
Var char_cnn(Graph& g, Var chars, ConvParams& p, Activation act = Activation::Tanh);

// ---------------------------------------------------------------------------
// Transformer encoder

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t hidden = 64;
  std::size_t heads = 4;
  std::size_t layers = 2;
  std::size_t ffn = 128;
  std::size_t max_len = 128;
  std::size_t segments = 2;
};

struct EncoderLayerParams {
  DenseParams q, k, v, o;
  Parameter ln1_gamma, ln1_beta;
  DenseParams ff1, ff2;
  Parameter ln2_gamma, ln2_beta;
};

struct EncoderParams {
  EncoderConfig config;
  Parameter token_emb;
  Parameter position_emb;
  Parameter segment_emb;
  Parameter emb_gamma, emb_beta;
  std::vector<EncoderLayerParams> blocks;

  /// Throws UsageError when hidden is not divisible by heads.
  static EncoderParams init(const EncoderConfig& cfg, Rng& rng);
  std::size_t count() const;
  void collect(std::vector<Parameter*>& out);
};

struct EncoderOutput {
  Var sequence;  // L x hidden
  Var pooled;    // 1 x hidden, first position
  /// attention[layer * heads + head] is L x L; rows sum to one over unmasked keys.
  std::vector<Tensor> attention;
};

/// Multi-head self-attention over x (L x hidden). key_mask[j] == 0 hides key j.
Var self_attention(Graph& g, Var x, EncoderLayerParams& p, std::size_t heads,
                   std::span<const int> key_mask, std::vector<Tensor>* weights = nullptr);
/// attention + residual + layer norm, then feed-forward + residual + layer norm.
Var encoder_block(Graph& g, Var x, EncoderLayerParams& p, std::size_t heads,
                  std::span<const int> key_mask, std::vector<Tensor>* weights = nullptr);

/// An empty mask means every position is real. Throws RangeError when the
/// sequence exceeds max_len or an id is out of range.
EncoderOutput transformer_encode(Graph& g, EncoderParams& p, std::span<const int> token_ids,
                                 std::span<const int> segment_ids, std::span<const int> mask = {});

}  // namespace medtl::layers

#endif  // MEDTL_LAYERS_HPP
