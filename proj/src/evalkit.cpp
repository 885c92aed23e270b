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

#include "medtl/evalkit.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "json.hpp"
#include "medtl/error.hpp"

namespace medtl::evalkit {

namespace {

std::size_t slot(Confusion& c, const std::string& label) {
  const auto it = std::find(c.labels.begin(), c.labels.end(), label);
  if (it != c.labels.end()) return static_cast<std::size_t>(it - c.labels.begin());
  c.labels.push_back(label);
  c.counts.emplace_back();
  return c.labels.size() - 1;
}

void add_pair(Confusion& c, const std::string& g, const std::string& p, bool include_padding,
              const std::string& pad) {
  if (g == pad && !include_padding) return;
  ++c.total;
  const std::size_t gi = slot(c, g);
  ++c.counts[gi].support;
  if (g == p) {
    ++c.correct;
    ++c.counts[gi].tp;
    return;
  }
  ++c.counts[gi].fn;
  if (p == pad && !include_padding) return;
  ++c.counts[slot(c, p)].fp;
}

nlohmann::ordered_json prf_json(const Prf& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::string pad_left(const std::string& s, std::size_t w) {
  return s.size() >= w ? s : std::string(w - s.size(), ' ') + s;
}

}  // namespace

Counts Confusion::of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? Counts{} : counts[static_cast<std::size_t>(it - labels.begin())];
}

void Confusion::merge(const Confusion& other) {
  for (std::size_t i = 0; i < other.labels.size(); ++i) {
    const std::size_t k = slot(*this, other.labels[i]);
    counts[k].tp += other.counts[i].tp;
    counts[k].fp += other.counts[i].fp;
    counts[k].fn += other.counts[i].fn;
    counts[k].support += other.counts[i].support;
  }
  correct += other.correct;
  total += other.total;
  padding_included = padding_included || other.padding_included;
}

Confusion confusion_counts(const std::vector<std::string>& gold, const std::vector<std::string>& pred,
                           const std::vector<std::string>& labels, bool include_padding, const std::string& pad) {
  if (gold.size() != pred.size())
    throw UsageError("confusion_counts: " + std::to_string(gold.size()) + " gold labels vs " +
                     std::to_string(pred.size()) + " predicted");
  Confusion c;
  c.padding_included = include_padding;
  for (const auto& l : labels) {
    if (l != pad || include_padding) slot(c, l);
  }
  for (std::size_t i = 0; i < gold.size(); ++i) add_pair(c, gold[i], pred[i], include_padding, pad);
  return c;
}

Confusion sentence_confusion(const std::vector<std::vector<std::string>>& gold,
                           const std::vector<std::vector<std::string>>& pred, const std::vector<std::string>& labels,
                           bool include_padding, const std::string& pad) {
  if (gold.size() != pred.size())
    throw UsageError("sentence_confusion: " + std::to_string(gold.size()) + " gold sentences vs " +
                     std::to_string(pred.size()) + " predicted");
  Confusion c = confusion_counts(std::vector<std::string>{}, {}, labels, include_padding, pad);
  for (std::size_t s = 0; s < gold.size(); ++s) {
    if (gold[s].size() != pred[s].size())
      throw UsageError("sentence_confusion: sentence " + std::to_string(s) + " length mismatch");
    for (std::size_t i = 0; i < gold[s].size(); ++i) add_pair(c, gold[s][i], pred[s][i], include_padding, pad);
  }
  return c;
}

Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf m;
  const double t = static_cast<double>(tp);
  if (tp + fp > 0) m.precision = t / static_cast<double>(tp + fp);
  if (tp + fn > 0) m.recall = t / static_cast<double>(tp + fn);
  if (m.precision + m.recall > 0) m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

EvalReport aggregate(const std::vector<LabelMetrics>& labels, std::size_t correct, std::size_t total) {
  EvalReport r;
  r.labels = labels;
  r.accuracy = total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
  for (const auto& l : labels) r.total_support += l.support;
  if (labels.empty()) return r;
  const double n = static_cast<double>(labels.size());
  for (const auto& l : labels) {
    r.macro.precision += l.metrics.precision / n;
    r.macro.recall += l.metrics.recall / n;
    r.macro.f1 += l.metrics.f1 / n;
  }
  if (r.total_support > 0) {
    const double s = static_cast<double>(r.total_support);
    for (const auto& l : labels) {
      const double w = static_cast<double>(l.support) / s;
      r.weighted.precision += w * l.metrics.precision;
      r.weighted.recall += w * l.metrics.recall;
      r.weighted.f1 += w * l.metrics.f1;
    }
  }
  return r;
}

EvalReport aggregate(const Confusion& c) {
  std::vector<LabelMetrics> labels;
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    const auto& k = c.counts[i];
    labels.push_back({c.labels[i], prf(k.tp, k.fp, k.fn), k.support});
  }
  EvalReport r = aggregate(labels, c.correct, c.total);
  r.padding_included = c.padding_included;
  return r;
}

SpanReport span_prf(const std::vector<corpus::EntitySpan>& gold, const std::vector<corpus::EntitySpan>& pred) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  std::map<Key, std::size_t> unmatched;
  SpanReport r;
  for (const auto& g : gold) {
    ++unmatched[{g.tag, g.start_token, g.end_token}];
    ++r.per_tag[g.tag].support;
  }
  for (const auto& p : pred) {
    auto& c = r.per_tag[p.tag];
    auto it = unmatched.find({p.tag, p.start_token, p.end_token});
    if (it != unmatched.end() && it->second > 0) {
      --it->second;
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (auto& [tag, c] : r.per_tag) {
    c.fn = c.support - c.tp;
    r.per_tag_metrics[tag] = prf(c.tp, c.fp, c.fn);
    r.overall.tp += c.tp;
    r.overall.fp += c.fp;
    r.overall.fn += c.fn;
    r.overall.support += c.support;
  }
  r.overall_metrics = prf(r.overall.tp, r.overall.fp, r.overall.fn);
  return r;
}

ConllEvaluation evaluate_conll(const std::vector<corpus::ConllDocument>& gold,
                               const std::vector<corpus::ConllDocument>& pred, bool include_padding) {
  if (gold.size() != pred.size())
    throw RangeError("gold has " + std::to_string(gold.size()) + " documents, prediction " +
                     std::to_string(pred.size()));
  std::vector<std::string> g, p;
  std::vector<corpus::EntitySpan> gs, ps;
  std::size_t offset = 0;
  for (std::size_t d = 0; d < gold.size(); ++d) {
    const auto& gd = gold[d];
    const auto& pd = pred[d];
    if (gd.doc_id != pd.doc_id || gd.sentences.size() != pd.sentences.size())
      throw RangeError("document " + std::to_string(d + 1) + " (" + gd.doc_id + ") does not line up");
    for (std::size_t s = 0; s < gd.sentences.size(); ++s) {
      const auto& a = gd.sentences[s];
      const auto& b = pd.sentences[s];
      if (a.tokens != b.tokens)
        throw RangeError(gd.doc_id + ": sentence " + std::to_string(s + 1) + " has different tokens");
      g.insert(g.end(), a.labels.begin(), a.labels.end());
      p.insert(p.end(), b.labels.begin(), b.labels.end());
      for (auto [spans, labels] : {std::pair{&gs, &a.labels}, std::pair{&ps, &b.labels}}) {
        for (auto sp : corpus::iob_to_spans(a.tokens, *labels)) {
          sp.start_token += offset;
          sp.end_token += offset;
          spans->push_back(std::move(sp));
        }
      }
      offset += a.tokens.size();
    }
  }
  return {aggregate(confusion_counts(g, p, {}, include_padding)), span_prf(gs, ps)};
}

std::string format_table(const EvalReport& r) {
  std::size_t w = std::string("weighted avg").size();
  for (const auto& l : r.labels) w = std::max(w, l.label.size());
  auto row = [&](const std::string& name, const std::string& p, const std::string& rc, const std::string& f,
                 std::size_t support) {
    return pad_left(name, w) + pad_left(p, 11) + pad_left(rc, 10) + pad_left(f, 10) +
           pad_left(std::to_string(support), 10) + "\n";
  };
  std::string out = pad_left("", w) + pad_left("precision", 11) + pad_left("recall", 10) + pad_left("f1-score", 10) +
                    pad_left("support", 10) + "\n\n";
  for (const auto& l : r.labels)
    out += row(l.label, pct(l.metrics.precision), pct(l.metrics.recall), pct(l.metrics.f1), l.support);
  out += "\n";
  out += row("accuracy", "", "", pct(r.accuracy), r.total_support);
  out += row("macro avg", pct(r.macro.precision), pct(r.macro.recall), pct(r.macro.f1), r.total_support);
  out += row("weighted avg", pct(r.weighted.precision), pct(r.weighted.recall), pct(r.weighted.f1), r.total_support);
  return out;
}

std::string to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (const auto& l : r.labels) {
    auto e = prf_json(l.metrics);
    e["label"] = l.label;
    e["support"] = l.support;
    labels.push_back(std::move(e));
  }
  j["labels"] = std::move(labels);
  j["accuracy"] = r.accuracy;
  j["macro_avg"] = prf_json(r.macro);
  j["weighted_avg"] = prf_json(r.weighted);
  j["total_support"] = r.total_support;
  j["padding_included"] = r.padding_included;
  return j.dump(2) + "\n";
}

std::string to_json(const SpanReport& r) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json tags = nlohmann::ordered_json::object();
  for (const auto& [tag, c] : r.per_tag) {
    auto e = prf_json(r.per_tag_metrics.at(tag));
    e["tp"] = c.tp;
    e["fp"] = c.fp;
    e["fn"] = c.fn;
    e["support"] = c.support;
    tags[tag] = std::move(e);
  }
  j["tags"] = std::move(tags);
  auto o = prf_json(r.overall_metrics);
  o["tp"] = r.overall.tp;
  o["fp"] = r.overall.fp;
  o["fn"] = r.overall.fn;
  o["support"] = r.overall.support;
  j["overall"] = std::move(o);
  return j.dump(2) + "\n";
}

}  // namespace medtl::evalkit
