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

#include "medtl/layers.hpp"

#include <cmath>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::layers {

Var activate(Graph& g, Var x, Activation a) {
  switch (a) {
    case Activation::Identity:
      return x;
    case Activation::Tanh:
      return g.tanh(x);
    case Activation::Relu:
      return g.relu(x);
    case Activation::Softmax:
      return g.softmax_rows(x);
  }
  return x;
}

DenseParams DenseParams::init(const std::string& name, std::size_t in, std::size_t out, Rng& rng) {
  return {Parameter(name + ".W", num::glorot_uniform(in, out, rng)), Parameter(name + ".b", Tensor(1, out))};
}

void DenseParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&W);
  out.push_back(&b);
}

Var dense(Graph& g, Var x, Var W, Var b, Activation act) {
  return activate(g, g.add_row(g.matmul(x, W), b), act);
}

Var dense(Graph& g, Var x, DenseParams& p, Activation act) {
  return dense(g, x, g.param(p.W), g.param(p.b), act);
}

// ---------------------------------------------------------------------------

LstmParams LstmParams::init(const std::string& name, std::size_t input_dim, std::size_t hidden, Rng& rng) {
  if (input_dim == 0 || hidden == 0) throw UsageError("lstm dimensions must be positive");
  LstmParams p{Parameter(name + ".W", num::glorot_uniform(input_dim, 4 * hidden, rng)),
               Parameter(name + ".U", num::glorot_uniform(hidden, 4 * hidden, rng)),
               Parameter(name + ".b", Tensor(1, 4 * hidden))};
  for (std::size_t j = hidden; j < 2 * hidden; ++j) p.b.value[j] = 1.0;
  return p;
}

void LstmParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&W);
  out.push_back(&U);
  out.push_back(&b);
}

LstmVars bind(Graph& g, LstmParams& p) { return {g.param(p.W), g.param(p.U), g.param(p.b)}; }

LstmState lstm_step_projected(Graph& g, Var xw, const LstmState& prev, const LstmVars& v) {
  const std::size_t h = g.value(v.U).rows();
  if (g.value(prev.h).cols() != h || g.value(prev.c).cols() != h)
    throw ShapeError("lstm state width does not match hidden size " + std::to_string(h));
  const Var z = g.add(g.add(xw, g.matmul(prev.h, v.U)), v.b);
  const Var i = g.sigmoid(g.slice_cols(z, 0, h));
  const Var f = g.sigmoid(g.slice_cols(z, h, h));
  const Var o = g.sigmoid(g.slice_cols(z, 2 * h, h));
  const Var c_hat = g.tanh(g.slice_cols(z, 3 * h, h));
  const Var c = g.add(g.mul(f, prev.c), g.mul(i, c_hat));
  return {g.mul(o, g.tanh(c)), c};
}

LstmState lstm_cell_step(Graph& g, Var x, const LstmState& prev, const LstmVars& v) {
  return lstm_step_projected(g, g.matmul(x, v.W), prev, v);
}

Var lstm(Graph& g, Var seq, LstmParams& p, bool reverse, const RecurrentOptions& opt) {
  const Tensor& X = g.value(seq);
  const std::size_t L = X.rows();
  if (L == 0) throw ShapeError("lstm over an empty sequence");
  if (X.cols() != p.input_dim())
    throw ShapeError("lstm input width " + std::to_string(X.cols()) + " != " + std::to_string(p.input_dim()));
  const std::size_t h = p.hidden();
  const LstmVars v = bind(g, p);
  const Var xw = g.matmul(seq, v.W);

  const bool drop = opt.training && opt.recurrent_dropout > 0.0;
  Tensor mask;
  if (drop) {
    if (!opt.rng) throw UsageError("recurrent dropout needs an rng");
    mask = Tensor(1, h);
    const double keep = 1.0 / (1.0 - opt.recurrent_dropout);
    for (auto& m : mask.data()) m = opt.rng->uniform() >= opt.recurrent_dropout ? keep : 0.0;
  }

  LstmState s{g.constant(Tensor(1, h)), g.constant(Tensor(1, h))};
  std::vector<Var> out(L);
  for (std::size_t k = 0; k < L; ++k) {
    const std::size_t t = reverse ? L - 1 - k : k;
    LstmState in = s;
    if (drop) in.h = g.mask_mul(s.h, mask);
    s = lstm_step_projected(g, g.slice_rows(xw, t, 1), in, v);
    out[t] = s.h;
  }
  return g.concat_rows(out);
}

Var bilstm(Graph& g, Var seq, LstmParams& fwd, LstmParams& bwd, const RecurrentOptions& opt) {
  const Var parts[2] = {lstm(g, seq, fwd, false, opt), lstm(g, seq, bwd, true, opt)};
  return g.concat_cols(parts);
}

// ---------------------------------------------------------------------------

ConvParams ConvParams::init(const std::string& name, std::size_t in, std::size_t filters, std::size_t width,
                            Rng& rng) {
  if (width == 0) throw UsageError("convolution width must be >= 1");
  return {Parameter(name + ".W", num::glorot_uniform(width * in, filters, rng)),
          Parameter(name + ".b", Tensor(1, filters)), width};
}

void ConvParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&W);
  out.push_back(&b);
}

Var conv1d(Graph& g, Var x, Var W, Var b, std::size_t width, Activation act) {
  return dense(g, g.window_stack(x, width), W, b, act);
}

Var conv1d_maxpool(Graph& g, Var x, Var W, Var b, std::size_t width, Activation act) {
  return g.max_rows(conv1d(g, x, W, b, width, act));
}

Var char_cnn(Graph& g, Var chars, ConvParams& p, Activation act) {
  return conv1d_maxpool(g, chars, g.param(p.W), g.param(p.b), p.width, act);
}

// ---------------------------------------------------------------------------

EncoderParams EncoderParams::init(const EncoderConfig& cfg, Rng& rng) {
  if (cfg.vocab_size == 0 || cfg.hidden == 0 || cfg.heads == 0 || cfg.max_len == 0)
    throw UsageError("encoder dimensions must be positive");
  if (cfg.hidden % cfg.heads != 0)
    throw UsageError("encoder hidden size " + std::to_string(cfg.hidden) + " is not divisible by " +
                     std::to_string(cfg.heads) + " heads");
  const std::size_t H = cfg.hidden;
  auto ones = [H] { return Tensor(1, H, 1.0); };
  EncoderParams p;
  p.config = cfg;
  p.token_emb = Parameter("enc.token", num::uniform_tensor(cfg.vocab_size, H, -0.1, 0.1, rng));
  for (auto& x : p.token_emb.value.row_span(0)) x = 0.0;
  p.token_emb.freeze_row0 = true;
  p.position_emb = Parameter("enc.position", num::uniform_tensor(cfg.max_len, H, -0.1, 0.1, rng));
  p.segment_emb = Parameter("enc.segment", num::uniform_tensor(cfg.segments, H, -0.1, 0.1, rng));
  p.emb_gamma = Parameter("enc.emb_ln.gamma", ones());
  p.emb_beta = Parameter("enc.emb_ln.beta", Tensor(1, H));
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const std::string n = "enc.l" + std::to_string(l);
    EncoderLayerParams b{DenseParams::init(n + ".q", H, H, rng),
                         DenseParams::init(n + ".k", H, H, rng),
                         DenseParams::init(n + ".v", H, H, rng),
                         DenseParams::init(n + ".o", H, H, rng),
                         Parameter(n + ".ln1.gamma", ones()),
                         Parameter(n + ".ln1.beta", Tensor(1, H)),
                         DenseParams::init(n + ".ff1", H, cfg.ffn, rng),
                         DenseParams::init(n + ".ff2", cfg.ffn, H, rng),
                         Parameter(n + ".ln2.gamma", ones()),
                         Parameter(n + ".ln2.beta", Tensor(1, H))};
    p.blocks.push_back(std::move(b));
  }
  return p;
}

void EncoderParams::collect(std::vector<Parameter*>& out) {
  out.push_back(&token_emb);
  out.push_back(&position_emb);
  out.push_back(&segment_emb);
  out.push_back(&emb_gamma);
  out.push_back(&emb_beta);
  for (auto& b : blocks) {
    b.q.collect(out);
    b.k.collect(out);
    b.v.collect(out);
    b.o.collect(out);
    out.push_back(&b.ln1_gamma);
    out.push_back(&b.ln1_beta);
    b.ff1.collect(out);
    b.ff2.collect(out);
    out.push_back(&b.ln2_gamma);
    out.push_back(&b.ln2_beta);
  }
}

std::size_t EncoderParams::count() const {
  std::size_t n = token_emb.size() + position_emb.size() + segment_emb.size() + emb_gamma.size() +
                  emb_beta.size();
  for (const auto& b : blocks) {
    n += b.q.count() + b.k.count() + b.v.count() + b.o.count() + b.ff1.count() + b.ff2.count();
    n += b.ln1_gamma.size() + b.ln1_beta.size() + b.ln2_gamma.size() + b.ln2_beta.size();
  }
  return n;
}

Var self_attention(Graph& g, Var x, EncoderLayerParams& p, std::size_t heads, std::span<const int> key_mask,
                   std::vector<Tensor>* weights) {
  const std::size_t L = g.value(x).rows();
  const std::size_t H = g.value(x).cols();
  if (heads == 0 || H % heads != 0) throw ShapeError("attention heads do not divide hidden size");
  if (!key_mask.empty() && key_mask.size() != L) throw ShapeError("attention mask length mismatch");
  const std::size_t dh = H / heads;

  Tensor additive(L, L);
  for (std::size_t j = 0; j < key_mask.size(); ++j) {
    if (key_mask[j] != 0) continue;
    for (std::size_t i = 0; i < L; ++i) additive(i, j) = -1e9;
  }

  const Var q = dense(g, x, p.q, Activation::Identity);
  const Var k = dense(g, x, p.k, Activation::Identity);
  const Var v = dense(g, x, p.v, Activation::Identity);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Var> per_head;
  per_head.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Var qh = g.slice_cols(q, h * dh, dh);
    const Var kh = g.slice_cols(k, h * dh, dh);
    const Var vh = g.slice_cols(v, h * dh, dh);
    const Var scores = g.add_const(g.scale(g.matmul(qh, g.transpose(kh)), scale), additive);
    const Var att = g.softmax_rows(scores);
    if (weights) weights->push_back(g.value(att));
    per_head.push_back(g.matmul(att, vh));
  }
  return dense(g, g.concat_cols(per_head), p.o, Activation::Identity);
}

Var encoder_block(Graph& g, Var x, EncoderLayerParams& p, std::size_t heads, std::span<const int> key_mask,
                  std::vector<Tensor>* weights) {
  const Var a = self_attention(g, x, p, heads, key_mask, weights);
  const Var h1 = g.layer_norm_rows(g.add(x, a), g.param(p.ln1_gamma), g.param(p.ln1_beta));
  const Var ff = dense(g, dense(g, h1, p.ff1, Activation::Relu), p.ff2, Activation::Identity);
  return g.layer_norm_rows(g.add(h1, ff), g.param(p.ln2_gamma), g.param(p.ln2_beta));
}

EncoderOutput transformer_encode(Graph& g, EncoderParams& p, std::span<const int> token_ids,
                                 std::span<const int> segment_ids, std::span<const int> mask) {
  const std::size_t L = token_ids.size();
  if (L == 0) throw ShapeError("transformer_encode on an empty sequence");
  if (L > p.config.max_len)
    throw RangeError("sequence length " + std::to_string(L) + " exceeds max " + std::to_string(p.config.max_len));
  if (segment_ids.size() != L) throw ShapeError("segment ids length mismatch");
  if (!mask.empty() && mask.size() != L) throw ShapeError("mask length mismatch");

  std::vector<int> positions(L);
  for (std::size_t t = 0; t < L; ++t) positions[t] = static_cast<int>(t);
  Var x = g.add(g.add(g.gather_rows(p.token_emb, token_ids), g.gather_rows(p.position_emb, positions)),
                g.gather_rows(p.segment_emb, segment_ids));
  x = g.layer_norm_rows(x, g.param(p.emb_gamma), g.param(p.emb_beta));

  EncoderOutput out;
  for (auto& b : p.blocks) x = encoder_block(g, x, b, p.config.heads, mask, &out.attention);
  out.sequence = x;
  out.pooled = g.slice_rows(x, 0, 1);
  return out;
}

}  // namespace medtl::layers
