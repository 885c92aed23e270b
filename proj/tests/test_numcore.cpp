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

#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "medtl/error.hpp"
#include "medtl/num/checkpoint.hpp"
#include "medtl/num/graph.hpp"
#include "medtl/num/optim.hpp"
#include "test_util.hpp"

using namespace medtl;
using namespace medtl::num;

TEST_CASE("matmul shape law and errors name both shapes") {
  Graph g;
  const Var a = g.constant(Tensor(2, 3, 1.0));
  const Var b = g.constant(Tensor(3, 1, 2.0));
  const Var c = g.matmul(a, b);
  CHECK(g.value(c).rows() == 2);
  CHECK(g.value(c).cols() == 1);
  CHECK(g.value(c)(1, 0) == doctest::Approx(6.0));
  try {
    g.matmul(a, a);
    FAIL("expected shape error");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
  }
}

TEST_CASE("dropout passthrough cases") {
  Rng rng(1);
  Graph g;
  const Var x = g.constant(Tensor(2, 2, {1, 2, 3, 4}));
  CHECK(g.dropout(x, 0.0, true, rng).id == x.id);
  CHECK(g.dropout(x, 0.5, false, rng).id == x.id);
  const Var d = g.dropout(x, 0.5, true, rng);
  for (std::size_t i = 0; i < 4; ++i) {
    const double v = g.value(d)[i];
    CHECK((v == 0.0 || v == doctest::Approx(2.0 * g.value(x)[i])));
  }
}

TEST_CASE("log_sum_exp") {
  const double a[] = {0.0, 0.0};
  CHECK(log_sum_exp(a) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double b[] = {1000.0, 1000.0};
  CHECK(log_sum_exp(b) == doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-12));
  const double c[] = {1.0, 2.0, 3.0};
  const long double direct = std::log(std::exp(1.0L) + std::exp(2.0L) + std::exp(3.0L));
  CHECK(std::abs(log_sum_exp(c) - static_cast<double>(direct)) < 1e-12);
  CHECK(std::abs(log_sum_exp(c) - 3.407606) < 1e-6);
  const double huge[] = {1e300, -1e300};
  CHECK(log_sum_exp(huge) == 1e300);
  CHECK_THROWS(log_sum_exp(std::span<const double>{}));

  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> v(1 + rng.below(6));
    for (auto& x : v) x = rng.uniform(-50, 50);
    const double m = *std::max_element(v.begin(), v.end());
    const double l = log_sum_exp(v);
    CHECK(l >= m);
    CHECK(l <= m + std::log(static_cast<double>(v.size())) + 1e-12);
  }
}

TEST_CASE("softmax") {
  const double a[] = {1.0, 1.0, 1.0};
  for (double p : softmax(a)) CHECK(p == doctest::Approx(1.0 / 3.0));
  const double b[] = {0.0, -std::numeric_limits<double>::infinity()};
  const auto pb = softmax(b);
  CHECK(pb[0] == 1.0);
  CHECK(pb[1] == 0.0);
  const double c[] = {0.3, -1.2, 2.5};
  const double cs[] = {7.3, 5.8, 9.5};
  const auto p1 = softmax(c), p2 = softmax(cs);
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(p1[i] - p2[i]) < 1e-12);
    CHECK(p1[i] > 0.0);
    sum += p1[i];
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("adam and nadam single steps") {
  Parameter p("w", Tensor(1, 1, 0.0));
  Parameter* list[] = {&p};
  Optimizer zero({OptimizerKind::Adam, 0.1});
  zero.step(list);
  CHECK(p.value[0] == 0.0);
  CHECK(zero.steps() == 1);

  p.grad[0] = 1.0;
  Optimizer adam({OptimizerKind::Adam, 0.1});
  adam.step(list);
  // m_hat = 1, v_hat = 1 -> update = lr / (1 + eps)
  CHECK(std::abs(p.value[0] + 0.1 / (1.0 + 1e-8)) < 1e-15);

  Parameter q("w", Tensor(1, 1, 0.0));
  q.grad[0] = 1.0;
  Parameter* qlist[] = {&q};
  Optimizer nadam({OptimizerKind::Nadam, 0.1});
  nadam.step(qlist);
  // direction = b1 * 1 + (1 - b1) * 1 / (1 - b1) = 1.9
  CHECK(std::abs(q.value[0] + 0.1 * 1.9 / (1.0 + 1e-8)) < 1e-15);
  CHECK(q.value[0] != p.value[0]);

  q.grad[0] = std::nan("");
  try {
    nadam.step(qlist);
    FAIL("expected numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("w") != std::string::npos);
  }
  CHECK(parse_optimizer("NAdam") == OptimizerKind::Nadam);
  CHECK_THROWS_AS(parse_optimizer("sgd"), UsageError);
}

TEST_CASE("optimizer skips frozen pad row") {
  Parameter e("emb", Tensor(2, 2, 0.0));
  e.freeze_row0 = true;
  e.grad.fill(1.0);
  Parameter* list[] = {&e};
  Optimizer opt({});
  opt.step(list);
  CHECK(e.value(0, 0) == 0.0);
  CHECK(e.value(1, 0) < 0.0);
}

TEST_CASE("global norm clipping") {
  Parameter a("a", Tensor(1, 2)), b("b", Tensor(1, 1));
  a.grad[0] = 3.0;
  a.grad[1] = 0.0;
  b.grad[0] = 4.0;
  Parameter* list[] = {&a, &b};
  CHECK(clip_global_norm(list, 1.0) == doctest::Approx(5.0));
  CHECK(a.grad[0] == doctest::Approx(0.6));
  CHECK(b.grad[0] == doctest::Approx(0.8));
}

TEST_CASE("grad check on sum of squares is exact") {
  Rng rng(5);
  std::vector<Parameter> ps = {testutil::random_param("x", 2, 3, rng)};
  auto list = testutil::ptrs(ps);
  const double err = grad_check([&](Graph& g) { const Var x = g.param(ps[0]); return g.sum(g.mul(x, x)); },
                                list);
  CHECK(err < 1e-8);
}

TEST_CASE("grad checks for core ops") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<Parameter> ps = {testutil::random_param("a", 3, 4, rng), testutil::random_param("b", 4, 2, rng),
                                 testutil::random_param("r", 1, 4, rng), testutil::random_param("c", 3, 4, rng),
                                 testutil::random_param("gm", 1, 4, rng), testutil::random_param("bt", 1, 4, rng),
                                 testutil::random_param("e", 5, 4, rng)};
    auto list = testutil::ptrs(ps);
    const int ids[] = {1, 3, 1, 0};
    const int targets[] = {2, -1, 0};
    auto loss = [&](Graph& g) {
      const Var a = g.param(ps[0]), b = g.param(ps[1]), r = g.param(ps[2]), c = g.param(ps[3]);
      std::vector<Var> terms;
      terms.push_back(testutil::probe(g, g.matmul(a, b), 11));
      terms.push_back(testutil::probe(g, g.tanh(g.add_row(a, r)), 12));
      terms.push_back(testutil::probe(g, g.sigmoid(g.sub(a, c)), 13));
      terms.push_back(testutil::probe(g, g.relu(g.mul(a, c)), 14));
      const Var parts[] = {a, c};
      terms.push_back(testutil::probe(g, g.concat_cols(parts), 15));
      terms.push_back(testutil::probe(g, g.concat_rows(parts), 16));
      terms.push_back(testutil::probe(g, g.slice_cols(g.slice_rows(a, 1, 2), 1, 2), 17));
      terms.push_back(testutil::probe(g, g.transpose(c), 18));
      terms.push_back(testutil::probe(g, g.max_rows(a), 19));
      terms.push_back(testutil::probe(g, g.softmax_rows(c), 20));
      terms.push_back(g.pick_nll(g.log_softmax_rows(a), targets));
      terms.push_back(testutil::probe(g, g.layer_norm_rows(a, g.param(ps[4]), g.param(ps[5])), 21));
      terms.push_back(testutil::probe(g, g.window_stack(a, 3), 22));
      terms.push_back(testutil::probe(g, g.gather_rows(ps[6], ids), 23));
      terms.push_back(testutil::probe(g, g.scale(g.add_const(a, Tensor(3, 4, 0.5)), 1.7), 24));
      Var total = terms[0];
      for (std::size_t i = 1; i < terms.size(); ++i) total = g.add(total, terms[i]);
      return total;
    };
    CHECK(grad_check(loss, list) < 1e-4);
  }
}

TEST_CASE("gather rows accumulates repeated ids") {
  Parameter e("e", Tensor(3, 2, {0, 0, 1, 2, 3, 4}));
  e.freeze_row0 = true;
  const int ids[] = {1, 1, 0};
  Graph g;
  const Var rows = g.gather_rows(e, ids);
  g.backward(g.sum(rows));
  CHECK(e.grad(1, 0) == 2.0);
  CHECK(e.grad(0, 0) == 0.0);
  const int bad[] = {3};
  CHECK_THROWS_AS(g.gather_rows(e, bad), RangeError);
}

TEST_CASE("checkpoint round trip is byte stable") {
  Checkpoint ck;
  ck.meta["kind"] = "test";
  ck.meta["vocab"] = "a\nb";
  ck.put("w", Tensor(2, 3, {1, -2, 3.5, 1e-300, 0, 7}));
  ck.put("b", Tensor(1, 1, 0.25));
  const std::string bytes = ck.serialize();
  CHECK(bytes.substr(0, 7) == "MEDTLCK");
  const auto back = Checkpoint::parse(bytes);
  CHECK(back.meta == ck.meta);
  CHECK(back.get("w")(1, 0) == 1e-300);
  CHECK(back.serialize() == bytes);
  CHECK_THROWS_AS(Checkpoint::parse(bytes.substr(0, bytes.size() - 3)), ParseError);
  CHECK_THROWS_AS(back.get("missing"), ParseError);

  const auto path = (std::filesystem::temp_directory_path() / "medtl_ck_test.bin").string();
  ck.save(path);
  CHECK(Checkpoint::load(path).serialize() == bytes);
  std::filesystem::remove(path);
}
