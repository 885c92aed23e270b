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

#ifndef MEDTL_NUM_OPTIM_HPP
#define MEDTL_NUM_OPTIM_HPP

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "medtl/num/graph.hpp"
#include "medtl/num/tensor.hpp"

namespace medtl::num {

enum class OptimizerKind { Adam, Nadam };

const char* optimizer_name(OptimizerKind k);
/// "adam" or "nadam", any case.
OptimizerKind parse_optimizer(const std::string& name);

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam / Nadam with bias correction. The parameter list passed to step()
/// must be the same, in the same order, on every call.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config) : config_(config) {}

  /// Applies one update from p->grad. Non-trainable parameters are skipped.
  /// Throws NumericError naming the parameter if a gradient is not finite.
  void step(std::span<Parameter* const> params);

  std::size_t steps() const { return step_; }
  const OptimizerConfig& config() const { return config_; }

 private:
  struct Moments {
    Tensor m, v;
  };
  OptimizerConfig config_;
  std::size_t step_ = 0;
  std::vector<Moments> moments_;
};

/// Rescales all gradients so their joint L2 norm is at most max_norm.
/// Returns the norm before clipping.
double clip_global_norm(std::span<Parameter* const> params, double max_norm);

void zero_grads(std::span<Parameter* const> params);

/// Largest relative error |a-n| / max(|a|,|n|,1e-8) between reverse-mode
/// gradients and central differences of `loss` with respect to every entry
/// of `params`. `loss` must build a deterministic 1 x 1 output.
double grad_check(const std::function<Var(Graph&)>& loss, std::span<Parameter* const> params,
                  double eps = 1e-5);

}  // namespace medtl::num

#endif  // MEDTL_NUM_OPTIM_HPP
