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

#include "medtl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>

#include "medtl/corpus.hpp"
#include "medtl/crf.hpp"
#include "medtl/error.hpp"
#include "medtl/evalkit.hpp"
#include "medtl/layers.hpp"
#include "medtl/medstatus.hpp"
#include "medtl/num/optim.hpp"
#include "medtl/oracle.hpp"
#include "medtl/rng.hpp"

namespace medtl::verify {

using corpus::Relation;
using num::Graph;
using num::Parameter;
using num::Tensor;
using num::Var;

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Recorder {
 public:
  explicit Recorder(std::string name) { r_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++r_.checks;
    if (!ok) {
      ++r_.failures;
      // Keep the report short when many checks fail.
      if (r_.failures <= 5) r_.details.push_back("FAILED " + what);
    }
  }
  void note(std::string line) { r_.details.push_back(std::move(line)); }

  SuiteResult done() {
    r_.passed = r_.failures == 0;
    return std::move(r_);
  }

 private:
  SuiteResult r_;
};

Var probe(Graph& g, Var x, std::uint64_t seed) {
  Rng rng(seed);
  const auto& v = g.value(x);
  return g.sum(g.mask_mul(x, num::uniform_tensor(v.rows(), v.cols(), 0.5, 1.5, rng)));
}

Parameter random_param(const std::string& name, std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  return Parameter(name, num::uniform_tensor(r, c, -scale, scale, rng));
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

// Rule text, independent of medstatus.
bool in_use_by_rules(Relation adm, Relation dis, std::optional<Relation> intermediate) {
  const bool dis_ok = dis == Relation::Before || dis == Relation::Overlap;
  if (adm == Relation::After && dis_ok) return true;
  if (adm == Relation::Overlap && dis == Relation::Overlap) return true;
  return intermediate == Relation::Overlap && dis_ok;
}

}  // namespace

SuiteResult crf_oracle(std::uint64_t seed) {
  Recorder rec("crf-oracle");
  Rng rng(seed);
  double worst = 0.0;
  std::size_t paths = 0;
  for (int n = 0; n < 200; ++n) {
    const std::size_t L = 1 + rng.below(6), T = 1 + rng.below(4);
    const Tensor e = num::uniform_tensor(L, T, -2, 2, rng);
    const Tensor tr = num::uniform_tensor(T + 2, T + 2, -2, 2, rng);
    const auto o = oracle::enumerate_paths(e, tr);
    const double lz = crf::log_partition(e, tr);
    const auto v = crf::viterbi(e, tr);
    const std::string at = "instance " + std::to_string(n);
    worst = std::max({worst, std::abs(lz - o.log_partition), std::abs(v.score - o.best_score)});
    paths += o.n_paths;
    rec.check(std::abs(lz - o.log_partition) < 1e-9, at + ": log partition");
    rec.check(std::abs(v.score - o.best_score) < 1e-9, at + ": viterbi score");
    rec.check(v.tags == o.best_path, at + ": viterbi path");
  }
  rec.note("instances 200, paths enumerated " + std::to_string(paths));
  rec.note("max abs difference " + fmt("%.3e", worst));
  return rec.done();
}

SuiteResult crf_derived() {
  Recorder rec("crf-derived");
  const Tensor e(2, 2, {1, 2, 3, 4});
  Tensor tr(4, 4);
  tr(0, 0) = 0.5;
  tr(0, 1) = -0.5;
  tr(1, 0) = 1.0;
  const auto o = oracle::enumerate_paths(e, tr);
  const double lz = crf::log_partition(e, tr);
  const auto v = crf::viterbi(e, tr);
  const double closed = std::log(2 * std::exp(4.5) + 2 * std::exp(6.0));
  rec.check(std::abs(lz - o.log_partition) < 1e-9, "log partition vs enumeration");
  rec.check(std::abs(lz - closed) < 1e-12, "log partition vs ln(2e^4.5 + 2e^6)");
  rec.check(v.score == 6.0, "viterbi score 6");
  rec.check(v.tags == std::vector<int>{1, 0}, "tie resolved to path [1,0]");
  rec.check(o.best_path == std::vector<int>{1, 0}, "enumeration agrees on the tie");
  rec.note("log_partition " + fmt("%.7f", lz) + ", enumerated " + fmt("%.7f", o.log_partition));
  rec.note("viterbi score " + fmt("%.1f", v.score) + ", path [" + std::to_string(v.tags[0]) + "," +
           std::to_string(v.tags[1]) + "]");
  return rec.done();
}

SuiteResult grad_checks(std::uint64_t seed) {
  using namespace layers;
  Recorder rec("grad-checks");
  auto run = [&](const std::string& name, const std::function<double(Rng&)>& one) {
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      Rng rng(seed * 1000 + s);
      const double err = one(rng);
      worst = std::max(worst, err);
      rec.check(err < 1e-4, name + " seed " + std::to_string(s) + ": relative error " + fmt("%.3e", err));
    }
    rec.note(name + " max relative error " + fmt("%.3e", worst));
  };

  run("lstm-cell", [](Rng& rng) {
    auto p = LstmParams::init("l", 3, 2, rng);
    std::vector<Parameter> io = {random_param("x", 1, 3, rng), random_param("h", 1, 2, rng),
                                 random_param("c", 1, 2, rng)};
    std::vector<Parameter*> list;
    p.collect(list);
    for (auto& q : io) list.push_back(&q);
    return num::grad_check(
        [&](Graph& g) {
          const auto s = lstm_cell_step(g, g.param(io[0]), {g.param(io[1]), g.param(io[2])}, bind(g, p));
          return g.add(probe(g, s.h, 1), probe(g, s.c, 2));
        },
        list);
  });

  run("bilstm", [](Rng& rng) {
    auto f = LstmParams::init("f", 2, 3, rng);
    auto b = LstmParams::init("b", 2, 3, rng);
    Parameter x = random_param("x", 3, 2, rng);
    std::vector<Parameter*> list;
    f.collect(list);
    b.collect(list);
    list.push_back(&x);
    return num::grad_check([&](Graph& g) { return probe(g, bilstm(g, g.param(x), f, b), 3); }, list);
  });

  run("char-cnn", [](Rng& rng) {
    auto p = ConvParams::init("c", 3, 4, 3, rng);
    p.b.value = num::uniform_tensor(1, 4, -0.5, 0.5, rng);
    Parameter x = random_param("x", 5, 3, rng);
    std::vector<Parameter*> list = {&p.W, &p.b, &x};
    return num::grad_check([&](Graph& g) { return probe(g, char_cnn(g, g.param(x), p), 4); }, list);
  });

  run("dense", [](Rng& rng) {
    auto d = DenseParams::init("d", 3, 4, rng);
    d.b.value = num::uniform_tensor(1, 4, -0.5, 0.5, rng);
    Parameter x = random_param("x", 2, 3, rng);
    std::vector<Parameter*> list = {&d.W, &d.b, &x};
    double worst = 0.0;
    for (auto act : {Activation::Identity, Activation::Tanh, Activation::Relu, Activation::Softmax}) {
      worst = std::max(worst, num::grad_check(
                                  [&](Graph& g) { return probe(g, dense(g, g.param(x), d, act), 5); }, list));
    }
    return worst;
  });

  run("attention-block", [](Rng& rng) {
    EncoderConfig cfg{8, 4, 2, 1, 6, 8, 2};
    auto p = EncoderParams::init(cfg, rng);
    auto& blk = p.blocks[0];
    for (auto* d : {&blk.q, &blk.k, &blk.v, &blk.o, &blk.ff1, &blk.ff2})
      d->b.value = num::uniform_tensor(1, d->out(), -0.3, 0.3, rng);
    Parameter x = random_param("x", 3, 4, rng);
    std::vector<Parameter*> list;
    for (auto* d : {&blk.q, &blk.v, &blk.o, &blk.ff1, &blk.ff2}) d->collect(list);
    list.push_back(&blk.k.W);  // the key bias has an identically zero gradient
    for (auto* q : {&blk.ln1_gamma, &blk.ln1_beta, &blk.ln2_gamma, &blk.ln2_beta}) list.push_back(q);
    list.push_back(&x);
    const int mask[] = {1, 1, 0};
    return num::grad_check([&](Graph& g) { return probe(g, encoder_block(g, g.param(x), blk, 2, mask), 6); },
                           list);
  });

  run("crf-nll", [](Rng& rng) {
    Parameter e = random_param("e", 3, 3, rng, 2.0), t = random_param("t", 5, 5, rng, 2.0);
    std::vector<Parameter*> list = {&e, &t};
    const int gold[] = {static_cast<int>(rng.below(3)), static_cast<int>(rng.below(3)),
                        static_cast<int>(rng.below(3))};
    return num::grad_check([&](Graph& g) { return crf::crf_nll(g, g.param(e), g.param(t), gold); }, list);
  });
  return rec.done();
}

SuiteResult rule_truth_table() {
  using namespace medstatus;
  Recorder rec("rule-truth-table");
  const auto doc = corpus::make_document(
      "rules", "Admission Date: 01/10/2019\n\nDischarge Date: 03/20/2019\n\n"
               "Lasix was started on February 14, 2019.\n");
  const auto dates = find_dates(doc);
  const auto anchors = find_anchor_dates(doc, dates);
  if (dates.size() != 3 || !anchors.admission || !anchors.discharge) {
    rec.check(false, "scenario dates");
    return rec.done();
  }
  const auto &adm = dates[0], &dis = dates[1], &mid = dates[2];
  auto status = [&](Relation a, Relation d, std::optional<Relation> m) {
    std::vector<DatedRelation> rels = {{adm, a}, {dis, d}};
    if (m) rels.push_back({mid, *m});
    return medication_status(rels, anchors).status;
  };

  const Relation all[] = {Relation::After, Relation::Overlap, Relation::Before};
  const std::optional<Relation> mids[] = {std::nullopt, Relation::Before, Relation::After, Relation::Overlap};
  std::size_t cases = 0, on = 0;
  for (Relation a : all) {
    for (Relation d : all) {
      for (const auto& m : mids) {
        const bool expect = in_use_by_rules(a, d, m);
        const bool got = status(a, d, m) == Status::InUse;
        on += got;
        ++cases;
        rec.check(got == expect, std::string("adm ") + corpus::relation_name(a) + ", dis " +
                                     corpus::relation_name(d) + ", intermediate " +
                                     (m ? corpus::relation_name(*m) : "none"));
      }
    }
  }
  rec.check(status(Relation::After, Relation::Before, std::nullopt) == Status::InUse, "AFTER/BEFORE is ON");
  rec.check(status(Relation::Overlap, Relation::Overlap, std::nullopt) == Status::InUse, "OVERLAP/OVERLAP is ON");
  rec.check(status(Relation::Before, Relation::After, std::nullopt) == Status::NotInUse, "BEFORE/AFTER is OFF");
  rec.note("cases " + std::to_string(cases) + ", ON " + std::to_string(on) + ", OFF " + std::to_string(cases - on));
  return rec.done();
}

SuiteResult metrics(std::uint64_t seed) {
  using namespace evalkit;
  Recorder rec("metrics");
  const auto c = confusion_counts({"A", "A", "B", "B"}, {"A", "B", "B", "B"});
  const auto r = aggregate(c);
  const Prf a = r.labels.at(0).metrics;
  rec.check(a.precision == 1.0, "P(A) = 1");
  rec.check(a.recall == 0.5, "R(A) = 0.5");
  rec.check(a.f1 == 2.0 / 3.0, "F1(A) = 2/3");
  const double macro = (2.0 / 3.0 + 0.8) / 2.0;
  rec.check(std::abs(r.macro.f1 - macro) < 1e-15, "macro F1 = (2/3 + 4/5) / 2");
  rec.check(r.accuracy == 0.75, "accuracy 3/4");
  rec.note("hand example: P(A) " + fmt("%.4f", a.precision) + ", R(A) " + fmt("%.4f", a.recall) + ", F1(A) " +
           fmt("%.4f", a.f1) + ", macro F1 " + fmt("%.4f", r.macro.f1));

  // Equal supports: every gold label appears k times.
  Rng rng(seed);
  double worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    const std::size_t labels = 2 + rng.below(4), k = 1 + rng.below(6);
    std::vector<std::string> gold, pred;
    for (std::size_t l = 0; l < labels; ++l) {
      for (std::size_t i = 0; i < k; ++i) gold.push_back("L" + std::to_string(l));
    }
    rng.shuffle(gold);
    for (std::size_t i = 0; i < gold.size(); ++i) pred.push_back("L" + std::to_string(rng.below(labels)));
    const auto eq = aggregate(confusion_counts(gold, pred));
    const double d = std::max({std::abs(eq.macro.precision - eq.weighted.precision),
                               std::abs(eq.macro.recall - eq.weighted.recall),
                               std::abs(eq.macro.f1 - eq.weighted.f1)});
    worst = std::max(worst, d);
    rec.check(d < 1e-12, "equal supports case " + std::to_string(n));
  }
  rec.note("equal-support cases 100, max |macro - weighted| " + fmt("%.3e", worst));
  return rec.done();
}

SuiteResult iob_codec(std::uint64_t seed) {
  Recorder rec("iob-codec");
  const auto& tags = corpus::TagScheme::i2b2_2009().base_tags();
  Rng rng(seed);
  std::size_t spans = 0;
  for (int n = 0; n < 1000; ++n) {
    const std::size_t len = rng.below(13);
    std::vector<std::string> labels, tokens;
    for (std::size_t i = 0; i < len; ++i) {
      tokens.push_back("w" + std::to_string(i));
      const bool open = i > 0 && labels.back() != "O";
      const std::size_t pick = rng.below(open ? 3 : 2);
      if (pick == 0) {
        labels.push_back("O");
      } else if (pick == 1) {
        labels.push_back("B-" + tags[rng.below(tags.size())]);
      } else {
        labels.push_back("I-" + labels.back().substr(2));
      }
    }
    const auto found = corpus::iob_to_spans(tokens, labels);
    spans += found.size();
    rec.check(corpus::spans_to_labels(len, found) == labels, "round trip of [" + join(labels) + "]");
  }
  rec.note("round trips 1000, spans " + std::to_string(spans));

  struct Case {
    std::vector<std::string> labels;
    std::string spans;
  };
  const std::vector<Case> table = {
      {{"I-m"}, "m:0-0"},
      {{"I-m", "O"}, "m:0-0"},
      {{"O", "I-m"}, "m:1-1"},
      {{"I-m", "I-m"}, "m:0-1"},
      {{"B-m", "I-do"}, "m:0-0 do:1-1"},
      {{"B-m", "O", "I-m"}, "m:0-0 m:2-2"},
      {{"I-do", "I-m"}, "do:0-0 m:1-1"},
      {{"B-m", "I-m", "I-do", "I-do"}, "m:0-1 do:2-3"},
      {{"O", "O", "I-f", "I-f", "O"}, "f:2-3"},
      {{"I-m", "B-m"}, "m:0-0 m:1-1"},
      {{"I-m", "B-m", "I-m"}, "m:0-0 m:1-2"},
      {{"B-m", "PAD", "I-m"}, "m:0-0 m:2-2"},
      {{"PAD", "I-r"}, "r:1-1"},
      {{"I-du", "O", "I-du", "I-du"}, "du:0-0 du:2-3"},
      {{"B-mo", "I-f", "I-mo"}, "mo:0-0 f:1-1 mo:2-2"},
      {{"I-m", "I-do", "I-f"}, "m:0-0 do:1-1 f:2-2"},
      {{"O"}, ""},
      {{}, ""},
      {{"B-r", "I-r", "O", "I-r", "I-m"}, "r:0-1 r:3-3 m:4-4"},
      {{"I-mo", "I-mo", "B-do", "I-do", "I-mo"}, "mo:0-1 do:2-3 mo:4-4"},
  };
  for (const auto& c : table) {
    std::vector<std::string> tokens(c.labels.size(), "w");
    std::vector<std::string> got;
    for (const auto& s : corpus::iob_to_spans(tokens, c.labels))
      got.push_back(s.tag + ":" + std::to_string(s.start_token) + "-" + std::to_string(s.end_token));
    rec.check(join(got) == c.spans, "repair of [" + join(c.labels) + "] gave '" + join(got) + "'");
  }
  rec.note("repair cases " + std::to_string(table.size()));
  return rec.done();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"crf-oracle", "crf-derived",      "grad-checks",
                                                 "rule-truth-table", "metrics", "iob-codec"};
  return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "crf-oracle") return crf_oracle(seed);
  if (name == "crf-derived") return crf_derived();
  if (name == "grad-checks") return grad_checks(seed);
  if (name == "rule-truth-table") return rule_truth_table();
  if (name == "metrics") return metrics(seed);
  if (name == "iob-codec") return iob_codec(seed);
  throw UsageError("unknown verification suite '" + name + "'");
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  for (const auto& n : suite_names()) out.push_back(run_suite(n, seed));
  return out;
}

std::string format_results(const std::vector<SuiteResult>& results) {
  std::string out;
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.passed;
    out += "suite " + r.name + ": " + (r.passed ? "PASS" : "FAIL") + " (" + std::to_string(r.checks) +
           " checks, " + std::to_string(r.failures) + " failed)\n";
    for (const auto& d : r.details) out += "  " + d + "\n";
  }
  out += std::to_string(passed) + "/" + std::to_string(results.size()) + " suites passed\n";
  return out;
}

}  // namespace medtl::verify
