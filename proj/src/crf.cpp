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

#include "medtl/crf.hpp"

#include <cmath>
#include <limits>

#include "medtl/corpus.hpp"
#include "medtl/error.hpp"
#include "medtl/rng.hpp"

namespace medtl::crf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t check_shapes(const Tensor& e, const Tensor& trans) {
  if (e.rank() != 2 || e.rows() == 0) throw ShapeError("crf: emissions must be L x T with L >= 1");
  const std::size_t T = e.cols();
  if (trans.rows() != T + 2 || trans.cols() != T + 2)
    throw ShapeError("crf: transitions are " + trans.shape_str() + ", expected " + std::to_string(T + 2) +
                     " x " + std::to_string(T + 2));
  return T;
}

void check_tags(std::span<const int> tags, std::size_t L, std::size_t T) {
  if (tags.size() != L)
    throw ShapeError("crf: " + std::to_string(tags.size()) + " tags for " + std::to_string(L) + " positions");
  for (int t : tags) {
    if (t < 0 || static_cast<std::size_t>(t) >= T) throw RangeError("crf: tag " + std::to_string(t) + " out of range");
  }
}

// Log-space forward and backward tables, both L x T.
struct ForwardBackward {
  Tensor alpha, beta;
  double log_z = 0.0;
};

Tensor forward_table(const Tensor& e, const Tensor& trans, double* log_z) {
  const std::size_t L = e.rows(), T = e.cols(), S = T, E = T + 1;
  Tensor alpha(L, T);
  for (std::size_t j = 0; j < T; ++j) alpha(0, j) = trans(S, j) + e(0, j);
  std::vector<double> buf(T);
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t j = 0; j < T; ++j) {
      for (std::size_t i = 0; i < T; ++i) buf[i] = alpha(t - 1, i) + trans(i, j);
      alpha(t, j) = num::log_sum_exp(buf) + e(t, j);
    }
  }
  for (std::size_t j = 0; j < T; ++j) buf[j] = alpha(L - 1, j) + trans(j, E);
  *log_z = num::log_sum_exp(buf);
  return alpha;
}

ForwardBackward forward_backward(const Tensor& e, const Tensor& trans) {
  const std::size_t L = e.rows(), T = e.cols(), E = T + 1;
  ForwardBackward fb;
  fb.alpha = forward_table(e, trans, &fb.log_z);
  fb.beta = Tensor(L, T);
  for (std::size_t i = 0; i < T; ++i) fb.beta(L - 1, i) = trans(i, E);
  std::vector<double> buf(T);
  for (std::size_t t = L - 1; t-- > 0;) {
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t j = 0; j < T; ++j) buf[j] = trans(i, j) + e(t + 1, j) + fb.beta(t + 1, j);
      fb.beta(t, i) = num::log_sum_exp(buf);
    }
  }
  return fb;
}

}  // namespace

CrfParams CrfParams::init(const std::string& name, std::size_t num_tags, Rng& rng) {
  CrfParams p = zeros(name, num_tags);
  const std::size_t T = num_tags;
  for (std::size_t i = 0; i <= T; ++i) {      // tags and START as sources
    for (std::size_t j = 0; j < T; ++j) p.transitions.value(i, j) = rng.uniform(-0.1, 0.1);
    p.transitions.value(i, T + 1) = rng.uniform(-0.1, 0.1);
  }
  return p;
}

CrfParams CrfParams::zeros(const std::string& name, std::size_t num_tags) {
  if (num_tags == 0) throw UsageError("crf needs at least one tag");
  return {num::Parameter(name, Tensor(num_tags + 2, num_tags + 2))};
}

double score_sequence(const Tensor& e, const Tensor& trans, std::span<const int> tags) {
  const std::size_t T = check_shapes(e, trans);
  const std::size_t L = e.rows();
  check_tags(tags, L, T);
  auto tag = [&](std::size_t t) { return static_cast<std::size_t>(tags[t]); };
  double s = trans(T, tag(0)) + e(0, tag(0));
  for (std::size_t t = 1; t < L; ++t) s += trans(tag(t - 1), tag(t)) + e(t, tag(t));
  return s + trans(tag(L - 1), T + 1);
}

double log_partition(const Tensor& e, const Tensor& trans) {
  check_shapes(e, trans);
  double log_z = 0.0;
  forward_table(e, trans, &log_z);
  return log_z;
}

ViterbiResult viterbi(const Tensor& e, const Tensor& trans) {
  const std::size_t T = check_shapes(e, trans);
  const std::size_t L = e.rows(), S = T, E = T + 1;
  Tensor delta(L, T);
  std::vector<std::vector<int>> back(L, std::vector<int>(T, 0));
  for (std::size_t j = 0; j < T; ++j) delta(0, j) = trans(S, j) + e(0, j);
  for (std::size_t t = 1; t < L; ++t) {
    for (std::size_t j = 0; j < T; ++j) {
      double best = kNegInf;
      int arg = 0;
      for (std::size_t i = 0; i < T; ++i) {
        const double v = delta(t - 1, i) + trans(i, j);
        if (v > best) {
          best = v;
          arg = static_cast<int>(i);
        }
      }
      delta(t, j) = best + e(t, j);
      back[t][j] = arg;
    }
  }
  ViterbiResult r;
  r.score = kNegInf;
  int last = 0;
  for (std::size_t j = 0; j < T; ++j) {
    const double v = delta(L - 1, j) + trans(j, E);
    if (v > r.score) {
      r.score = v;
      last = static_cast<int>(j);
    }
  }
  r.tags.assign(L, 0);
  r.tags[L - 1] = last;
  for (std::size_t t = L - 1; t > 0; --t) r.tags[t - 1] = back[t][static_cast<std::size_t>(r.tags[t])];
  return r;
}

Tensor marginals(const Tensor& e, const Tensor& trans) {
  check_shapes(e, trans);
  const ForwardBackward fb = forward_backward(e, trans);
  Tensor m(e.rows(), e.cols());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::exp(fb.alpha[i] + fb.beta[i] - fb.log_z);
  return m;
}

num::Var crf_nll(num::Graph& g, num::Var emissions, num::Var transitions, std::span<const int> gold) {
  const Tensor& e = g.value(emissions);
  const Tensor& trans = g.value(transitions);
  const std::size_t T = check_shapes(e, trans);
  check_tags(gold, e.rows(), T);
  const std::vector<int> tags(gold.begin(), gold.end());

  double log_z = 0.0;
  forward_table(e, trans, &log_z);
  const double loss = log_z - score_sequence(e, trans, tags);

  return g.custom(Tensor(1, 1, loss), [emissions, transitions, tags](num::Graph& g, std::size_t self) {
    const double up = g.grad(num::Var{self})[0];
    const Tensor& e = g.value(emissions);
    const Tensor& trans = g.value(transitions);
    const std::size_t L = e.rows(), T = e.cols(), S = T, E = T + 1;
    const ForwardBackward fb = forward_backward(e, trans);

    Tensor& de = g.grad(emissions);
    for (std::size_t t = 0; t < L; ++t) {
      for (std::size_t j = 0; j < T; ++j)
        de(t, j) += up * std::exp(fb.alpha(t, j) + fb.beta(t, j) - fb.log_z);
      de(t, static_cast<std::size_t>(tags[t])) -= up;
    }

    Tensor& dt = g.grad(transitions);
    for (std::size_t j = 0; j < T; ++j) {
      dt(S, j) += up * std::exp(fb.alpha(0, j) + fb.beta(0, j) - fb.log_z);
      dt(j, E) += up * std::exp(fb.alpha(L - 1, j) + fb.beta(L - 1, j) - fb.log_z);
    }
    for (std::size_t t = 0; t + 1 < L; ++t) {
      for (std::size_t i = 0; i < T; ++i) {
        for (std::size_t j = 0; j < T; ++j) {
          dt(i, j) += up * std::exp(fb.alpha(t, i) + trans(i, j) + e(t + 1, j) + fb.beta(t + 1, j) - fb.log_z);
        }
      }
    }
    auto tag = [&](std::size_t t) { return static_cast<std::size_t>(tags[t]); };
    dt(S, tag(0)) -= up;
    for (std::size_t t = 1; t < L; ++t) dt(tag(t - 1), tag(t)) -= up;
    dt(tag(L - 1), E) -= up;
  });
}

Tensor iob_constraint_mask(const corpus::TagScheme& scheme) {
  const auto& labels = scheme.labels();
  const std::size_t T = labels.size() - 1;  // PAD excluded
  Tensor mask(T + 2, T + 2);
  auto label = [&](std::size_t k) -> const std::string& { return labels[k + 1]; };
  for (std::size_t j = 0; j < T; ++j) {
    const std::string& to = label(j);
    if (to.rfind("I-", 0) != 0) continue;
    const std::string type = to.substr(2);
    mask(T, j) = kNegInf;
    for (std::size_t i = 0; i < T; ++i) {
      const std::string& from = label(i);
      const bool same = from.size() > 2 && from.substr(2) == type && from[1] == '-';
      if (!same) mask(i, j) = kNegInf;
    }
  }
  return mask;
}

Tensor constrained(const Tensor& transitions, const Tensor& mask) {
  if (!transitions.same_shape(mask)) throw ShapeError("crf: constraint mask shape mismatch");
  Tensor out = transitions;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += mask[i];
  return out;
}

}  // namespace medtl::crf
