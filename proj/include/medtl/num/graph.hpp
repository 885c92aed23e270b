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

// Tape-based reverse-mode differentiation over rank-2 tensors.
//
// A Graph records every operation in creation order; backward() walks the
// tape in reverse, so the recorded order is already topological. Graphs are
// cheap and meant to be built once per training example.

#ifndef MEDTL_NUM_GRAPH_HPP
#define MEDTL_NUM_GRAPH_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "medtl/num/tensor.hpp"

namespace medtl::num {

struct Var {
  std::size_t id = SIZE_MAX;
  bool valid() const { return id != SIZE_MAX; }
};

class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  /// With record_grad == false no backward closures are kept (inference).
  explicit Graph(bool record_grad = true) : record_(record_grad) {}

  /// References stay valid for the lifetime of the graph.
  const Tensor& value(Var v) const { return nodes_[v.id].value; }
  /// Gradient accumulator of a node, allocated on first use.
  Tensor& grad(Var v) { return grad_of(v.id); }
  std::size_t size() const { return nodes_.size(); }

  Var constant(Tensor t);
  /// Leaf bound to a parameter; its gradient is added to p.grad on backward.
  Var param(Parameter& p);
  /// Rows `ids` of p.value stacked; gradients scatter-add into p.grad.
  /// Out-of-range ids throw RangeError.
  Var gather_rows(Parameter& p, std::span<const int> ids);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  /// m (r x c) + row (1 x c) broadcast over rows.
  Var add_row(Var m, Var row);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  /// a + c with c constant (used for additive attention masks).
  Var add_const(Var a, const Tensor& c);

  Var tanh(Var a);
  Var sigmoid(Var a);
  Var relu(Var a);

  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var slice_cols(Var a, std::size_t begin, std::size_t count);
  Var slice_rows(Var a, std::size_t begin, std::size_t count);
  Var transpose(Var a);

  /// Sum of all entries, 1 x 1.
  Var sum(Var a);
  /// Column-wise max over rows, 1 x c. Ties go to the first row.
  Var max_rows(Var a);

  Var softmax_rows(Var a);
  Var log_softmax_rows(Var a);
  /// Sum over rows t with targets[t] >= 0 of -a(t, targets[t]); 1 x 1.
  Var pick_nll(Var log_probs, std::span<const int> targets);

  /// Inverted dropout: kept units scaled by 1/(1-p) when training; identity
  /// otherwise or when p == 0.
  Var dropout(Var a, double p, bool training, Rng& rng);
  /// Elementwise product with a constant mask.
  Var mask_mul(Var a, const Tensor& mask);

  Var layer_norm_rows(Var x, Var gamma, Var beta, double eps = 1e-5);

  /// Row t of the result is rows t-left .. t+right of x side by side, with
  /// zero rows outside x (SAME padding); left = (width-1)/2.
  Var window_stack(Var x, std::size_t width);

  /// Custom node. `backward` receives the node's output gradient through
  /// grad(Var{self}) and must add into the gradients of `inputs`.
  Var custom(Tensor value, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1 and propagates. `loss` must be 1 x 1.
  void backward(Var loss);

  bool recording() const { return record_; }

 private:
  struct Node {
    Tensor value;
    std::unique_ptr<Tensor> grad;
    BackwardFn backward;
  };

  Tensor& grad_of(std::size_t id);
  bool has_grad(std::size_t id) const { return static_cast<bool>(nodes_[id].grad); }
  Var push(Tensor value, BackwardFn fn);

  bool record_;
  std::deque<Node> nodes_;  // stable references across push_back
};

/// log sum_i exp(v_i) with max-shift. Throws std::invalid_argument on empty input.
double log_sum_exp(std::span<const double> v);
/// Shift-invariant softmax; -inf entries get probability 0.
std::vector<double> softmax(std::span<const double> v);

}  // namespace medtl::num

#endif  // MEDTL_NUM_GRAPH_HPP
