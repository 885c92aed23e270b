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

#include "medtl/num/optim.hpp"

#include <algorithm>
#include <cmath>

#include "medtl/error.hpp"
#include "medtl/textproc.hpp"

namespace medtl::num {

const char* optimizer_name(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "nadam"; }

OptimizerKind parse_optimizer(const std::string& name) {
  const std::string n = text::ascii_lower(name);
  if (n == "adam") return OptimizerKind::Adam;
  if (n == "nadam") return OptimizerKind::Nadam;
  throw UsageError("unknown optimizer '" + name + "' (expected adam or nadam)");
}

void Optimizer::step(std::span<Parameter* const> params) {
  if (moments_.empty()) {
    moments_.reserve(params.size());
    for (const auto* p : params) moments_.push_back({Tensor(p->value.shape()), Tensor(p->value.shape())});
  }
  if (moments_.size() != params.size())
    throw std::logic_error("optimizer parameter list changed between steps");

  for (const auto* p : params) {
    if (!p->trainable) continue;
    if (!p->grad.same_shape(p->value))
      throw ShapeError("gradient of " + p->name + " has shape " + p->grad.shape_str() +
                       ", parameter " + p->value.shape_str());
    for (double g : p->grad.data()) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient in parameter " + p->name);
    }
  }

  ++step_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    if (!p.trainable) continue;
    auto& [m, v] = moments_[k];
    if (!m.same_shape(p.value)) throw ShapeError("moment shape mismatch for " + p.name);
    const std::size_t skip = p.freeze_row0 ? p.value.cols() : 0;
    for (std::size_t i = skip; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = b1 * m[i] + (1.0 - b1) * g;
      v[i] = b2 * v[i] + (1.0 - b2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      double direction = m_hat;
      if (config_.kind == OptimizerKind::Nadam) direction = b1 * m_hat + (1.0 - b1) * g / c1;
      p.value[i] -= config_.lr * direction / (std::sqrt(v_hat) + config_.eps);
    }
  }
}

double clip_global_norm(std::span<Parameter* const> params, double max_norm) {
  double sq = 0.0;
  for (const auto* p : params) {
    if (!p->trainable) continue;
    for (double g : p->grad.data()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double s = max_norm / norm;
    for (auto* p : params) {
      if (!p->trainable) continue;
      for (double& g : p->grad.data()) g *= s;
    }
  }
  return norm;
}

void zero_grads(std::span<Parameter* const> params) {
  for (auto* p : params) p->zero_grad();
}

double grad_check(const std::function<Var(Graph&)>& loss, std::span<Parameter* const> params,
                  double eps) {
  zero_grads(params);
  {
    Graph g;
    const Var out = loss(g);
    g.backward(out);
  }
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto* p : params) analytic.push_back(p->grad);

  auto eval = [&] {
    Graph g(false);
    return g.value(loss(g))[0];
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double saved = p.value[i];
      p.value[i] = saved + eps;
      const double up = eval();
      p.value[i] = saved - eps;
      const double down = eval();
      p.value[i] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[k][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  zero_grads(params);
  return worst;
}

}  // namespace medtl::num
