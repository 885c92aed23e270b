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

#include "medtl/relex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

#include "medtl/error.hpp"
#include "medtl/rng.hpp"
#include "medtl/textproc.hpp"

namespace medtl::relex {

namespace {

using corpus::AnnotatedDocument;
using corpus::EntitySpan;
using num::Graph;
using num::Tensor;
using num::Var;

constexpr std::array<const char*, kReservedCount - 2> kReservedWords = {"[CLS]", "[SEP]", "[E]",
                                                                         "[/E]",  "[T]",   "[/T]"};

std::size_t sentence_of(const AnnotatedDocument& doc, const EntitySpan& s) {
  if (s.start_token >= doc.tokens().size() || s.end_token >= doc.tokens().size() || s.end_token < s.start_token)
    throw RangeError("span '" + s.surface + "' lies outside the document tokens");
  return doc.tokens()[s.start_token].sentence_index;
}

// Tokens of one sentence with both span markers inserted where they fall.
void append_sentence(const AnnotatedDocument& doc, std::size_t sent, const EntitySpan& event, const EntitySpan& time,
                     const embed::Vocab& vocab, std::vector<int>& out) {
  const auto [b, e] = doc.tokenized.sentence_tokens[sent];
  for (std::size_t i = b; i < e; ++i) {
    if (i == event.start_token) out.push_back(kEventOpen);
    if (i == time.start_token) out.push_back(kTimeOpen);
    out.push_back(vocab.id(text::ascii_lower(doc.tokens()[i].text)));
    if (i == time.end_token) out.push_back(kTimeClose);
    if (i == event.end_token) out.push_back(kEventClose);
  }
}

std::vector<const EntitySpan*> ordered(const std::map<std::string, EntitySpan>& spans,
                                       const std::set<std::string>& tags) {
  std::vector<const EntitySpan*> out;
  for (const auto& [id, s] : spans) {
    if (tags.empty() || tags.count(s.tag)) out.push_back(&s);
  }
  std::stable_sort(out.begin(), out.end(), [](const EntitySpan* a, const EntitySpan* b) {
    return std::tie(a->start_token, a->end_token, a->id) < std::tie(b->start_token, b->end_token, b->id);
  });
  return out;
}

std::optional<Relation> gold_relation(const AnnotatedDocument& doc, const EntitySpan& event, const EntitySpan& time) {
  for (const auto& l : doc.tlinks) {
    if (l.source == time.id && l.target == event.id) return l.relation;
    if (l.source == event.id && l.target == time.id) return corpus::invert(l.relation);
  }
  return std::nullopt;
}

std::string clean(std::string s) {
  for (auto& c : s) {
    if (c == '\t' || c == '\n' || c == '\r' || c == '|') c = ' ';
  }
  return s;
}

std::string write_span(const EntitySpan& s) {
  std::ostringstream o;
  o << clean(s.id) << '|' << s.start_token << '|' << s.end_token << '|' << s.start_char << '|' << s.end_char
    << '|' << clean(s.tag) << '|' << clean(s.surface);
  return o.str();
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::size_t to_size(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw ParseError("expected a non-negative integer, got '" + s + "'", line);
  }
}

EntitySpan read_span(const std::string& field, std::size_t line) {
  const auto parts = split(field, '|');
  if (parts.size() != 7) throw ParseError("span field needs 7 '|'-separated parts", line);
  EntitySpan s;
  s.id = parts[0];
  s.start_token = to_size(parts[1], line);
  s.end_token = to_size(parts[2], line);
  s.start_char = to_size(parts[3], line);
  s.end_char = to_size(parts[4], line);
  s.tag = parts[5];
  s.surface = parts[6];
  return s;
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

}  // namespace

embed::Vocab reserved_vocab() {
  embed::Vocab v;
  for (const char* w : kReservedWords) v.add(w);
  return v;
}

embed::Vocab build_relation_vocab(const std::vector<AnnotatedDocument>& docs) {
  embed::Vocab v = reserved_vocab();
  for (const auto& d : docs) {
    for (const auto& t : d.tokens()) v.add(text::ascii_lower(t.text));
  }
  v.freeze();
  return v;
}

CandidateSet generate_candidates(const AnnotatedDocument& doc, const embed::Vocab& vocab,
                                 const CandidateOptions& opts) {
  if (vocab.size() < static_cast<std::size_t>(kReservedCount) || vocab.word(kCls) != kReservedWords[0])
    throw UsageError("relation vocabulary lacks the reserved tokens");
  CandidateSet out;
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
  const auto events = ordered(doc.events, opts.event_tags);
  const auto times = ordered(doc.timexes, opts.time_tags);
  for (const EntitySpan* ev : events) {
    const std::size_t se = sentence_of(doc, *ev);
    for (const EntitySpan* tm : times) {
      const std::size_t st = sentence_of(doc, *tm);
      const std::size_t dist = se > st ? se - st : st - se;
      if (dist > opts.window && !opts.anchor_ids.count(tm->id)) continue;
      if (!seen.insert({ev->start_token, ev->end_token, tm->start_token, tm->end_token}).second) continue;

      RelationInstance inst;
      inst.doc_id = doc.doc_id;
      inst.event = *ev;
      inst.time = *tm;
      inst.label = gold_relation(doc, *ev, *tm);
      inst.token_ids.push_back(kCls);
      append_sentence(doc, se, *ev, *tm, vocab, inst.token_ids);
      inst.token_ids.push_back(kSep);
      inst.segment_ids.assign(inst.token_ids.size(), 0);
      if (st != se) {
        append_sentence(doc, st, *ev, *tm, vocab, inst.token_ids);
        inst.token_ids.push_back(kSep);
        inst.segment_ids.resize(inst.token_ids.size(), 1);
      }
      if (inst.token_ids.size() > opts.max_len) {
        ++out.skipped_overflow;
        out.warnings.push_back(doc.doc_id + ": context of (" + ev->surface + ", " + tm->surface + ") has " +
                               std::to_string(inst.token_ids.size()) + " tokens, limit " +
                               std::to_string(opts.max_len));
        continue;
      }
      out.instances.push_back(std::move(inst));
    }
  }
  return out;
}

std::array<std::size_t, kNumRelations> class_counts(const std::vector<RelationInstance>& instances) {
  std::array<std::size_t, kNumRelations> n{};
  for (const auto& i : instances) {
    if (i.label) ++n[static_cast<std::size_t>(*i.label)];
  }
  return n;
}

std::vector<RelationInstance> downsample_balanced(const std::vector<RelationInstance>& instances,
                                                  std::size_t n_per_class, std::uint64_t seed,
                                                  bool with_replacement) {
  std::array<std::vector<std::size_t>, kNumRelations> by_class;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (!instances[i].label) throw UsageError("downsample_balanced: instance " + std::to_string(i) + " is unlabeled");
    by_class[static_cast<std::size_t>(*instances[i].label)].push_back(i);
  }
  Rng rng(seed);
  std::vector<RelationInstance> out;
  out.reserve(n_per_class * kNumRelations);
  for (std::size_t c = 0; c < kNumRelations; ++c) {
    auto& idx = by_class[c];
    const char* name = corpus::relation_name(static_cast<Relation>(c));
    if (with_replacement) {
      if (idx.empty() && n_per_class > 0) throw RangeError(std::string("no instances of class ") + name);
      for (std::size_t k = 0; k < n_per_class; ++k) out.push_back(instances[idx[rng.below(idx.size())]]);
      continue;
    }
    if (idx.size() < n_per_class)
      throw RangeError(std::string("class ") + name + " has " + std::to_string(idx.size()) + " instances, " +
                       std::to_string(n_per_class) + " requested");
    rng.shuffle(idx);
    for (std::size_t k = 0; k < n_per_class; ++k) out.push_back(instances[idx[k]]);
  }
  rng.shuffle(out);
  return out;
}

std::vector<AnnotatedDocument> separable_relation_documents(std::size_t n_per_class, std::uint64_t seed) {
  static constexpr std::array<const char*, 6> meds = {"Aspirin", "Heparin", "Lasix",
                                                      "Coumadin", "Metformin", "Prednisone"};
  static constexpr std::array<const char*, 6> months = {"January", "March", "May", "July", "September", "November"};
  static constexpr std::array<const char*, 6> fillers = {"the", "patient", "reported", "that", "his", "dose"};
  // Trigger words per class, in class order.
  static constexpr std::array<std::array<const char*, 3>, kNumRelations> triggers = {{
      {"before", "until", "prior"},
      {"during", "throughout", "while"},
      {"after", "following", "since"},
  }};

  Rng rng(seed);
  std::vector<std::size_t> classes;
  for (std::size_t c = 0; c < kNumRelations; ++c) classes.insert(classes.end(), n_per_class, c);
  rng.shuffle(classes);

  std::vector<AnnotatedDocument> docs;
  docs.reserve(classes.size());
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::size_t c = classes[i];
    std::string text;
    auto filler = [&] {
      text += fillers[rng.below(fillers.size())];
      text += ' ';
    };
    if (rng.below(2)) filler();
    const std::size_t med_begin = text.size();
    text += meds[rng.below(meds.size())];
    const std::size_t med_end = text.size();
    text += " was taken ";
    if (rng.below(2)) filler();
    text += triggers[c][rng.below(3)];
    text += ' ';
    const std::size_t time_begin = text.size();
    text += std::string(months[rng.below(months.size())]) + " " + std::to_string(2010 + rng.below(10));
    const std::size_t time_end = text.size();
    if (rng.below(2)) {
      text += ' ';
      text += fillers[rng.below(fillers.size())];
    }
    text += ".\n";

    AnnotatedDocument doc = corpus::make_document("rel_" + std::to_string(i), text);
    doc.events.emplace("E0", corpus::span_from_chars(doc, "TREATMENT", med_begin, med_end, "E0"));
    doc.timexes.emplace("T0", corpus::span_from_chars(doc, "DATE", time_begin, time_end, "T0"));
    doc.tlinks.push_back({"T0", "E0", static_cast<Relation>(c)});
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::string write_instances(const std::vector<RelationInstance>& instances) {
  std::ostringstream out;
  for (const auto& i : instances) {
    out << clean(i.doc_id) << '\t' << write_span(i.event) << '\t' << write_span(i.time) << '\t'
        << (i.label ? corpus::relation_name(*i.label) : "-") << '\t';
    for (std::size_t k = 0; k < i.token_ids.size(); ++k) out << (k ? " " : "") << i.token_ids[k];
    out << '\n';
  }
  return out.str();
}

std::vector<RelationInstance> read_instances(std::string_view text) {
  std::vector<RelationInstance> out;
  std::size_t line_no = 0;
  for (const auto& line : split(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 5) throw ParseError("expected 5 tab-separated columns", line_no);
    RelationInstance inst;
    inst.doc_id = cols[0];
    inst.event = read_span(cols[1], line_no);
    inst.time = read_span(cols[2], line_no);
    if (cols[3] != "-") {
      inst.label = corpus::parse_relation(cols[3]);
      if (!inst.label) throw ParseError("unknown relation '" + cols[3] + "'", line_no);
    }
    int segment = 0;
    for (const auto& tok : split(cols[4], ' ')) {
      const int id = static_cast<int>(to_size(tok, line_no));
      inst.token_ids.push_back(id);
      inst.segment_ids.push_back(segment);
      if (id == kSep) segment = 1;
    }
    if (inst.token_ids.empty() || inst.token_ids.front() != kCls)
      throw ParseError("context must start with [CLS]", line_no);
    out.push_back(std::move(inst));
  }
  return out;
}

// ---------------------------------------------------------------------------

void RelConfig::validate() const {
  for (std::size_t i = 0; i < kernel_widths.size(); ++i) {
    if (kernel_widths[i] == 0) throw UsageError("relation config: kernel widths must be >= 1");
    if (kernel_widths[i] > encoder.max_len)
      throw UsageError("relation config: kernel width " + std::to_string(kernel_widths[i]) + " exceeds max_len");
    for (std::size_t j = 0; j < i; ++j) {
      if (kernel_widths[i] == kernel_widths[j]) throw UsageError("relation config: kernel widths must be distinct");
    }
  }
  if (filters == 0 || batch_size == 0) throw UsageError("relation config: filters and batch_size must be positive");
  for (double p : {encoder_dropout, head_dropout}) {
    if (!(p >= 0.0 && p < 1.0)) throw UsageError("relation config: dropout must be in [0, 1)");
  }
  if (!(learning_rate > 0.0)) throw UsageError("relation config: learning_rate must be positive");
}

std::vector<num::Parameter*> RelModel::parameters() {
  std::vector<num::Parameter*> out;
  encoder.collect(out);
  for (auto& c : convs) c.collect(out);
  head.collect(out);
  return out;
}

std::size_t RelModel::parameter_count() const {
  std::size_t n = encoder.count() + head.count();
  for (const auto& c : convs) n += c.count();
  return n;
}

RelModel build_rel(const RelConfig& config, embed::Vocab vocab) {
  config.validate();
  if (vocab.size() < static_cast<std::size_t>(kReservedCount) || vocab.word(kCls) != kReservedWords[0])
    throw UsageError("relation vocabulary lacks the reserved tokens");
  RelModel m;
  m.config = config;
  m.config.encoder.vocab_size = vocab.size();
  m.vocab = std::move(vocab);
  Rng rng(config.seed);
  m.encoder = layers::EncoderParams::init(m.config.encoder, rng);
  const std::size_t H = m.config.encoder.hidden;
  for (std::size_t k = 0; k < 3; ++k) {
    m.convs[k] = layers::ConvParams::init("rel.conv" + std::to_string(k), H, config.filters,
                                          config.kernel_widths[k], rng);
  }
  m.head = layers::DenseParams::init("rel.head", 3 * config.filters + H, kNumRelations, rng);
  return m;
}

Var relation_logits(Graph& g, RelModel& m, const RelationInstance& inst, bool training, Rng* rng) {
  if (training && !rng) throw UsageError("training forward pass needs an rng");
  if (inst.segment_ids.size() != inst.token_ids.size()) throw ShapeError("segment ids length mismatch");
  thread_local Rng unused(0);  // dropout draws nothing outside training
  Rng& r = rng ? *rng : unused;
  for (int id : inst.token_ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= m.vocab.size())
      throw RangeError("token id " + std::to_string(id) + " outside the relation vocabulary");
  }
  const auto enc = layers::transformer_encode(g, m.encoder, inst.token_ids, inst.segment_ids);
  const Var seq = g.dropout(enc.sequence, m.config.encoder_dropout, training, r);
  std::vector<Var> parts;
  for (auto& c : m.convs) {
    parts.push_back(layers::conv1d_maxpool(g, seq, g.param(c.W), g.param(c.b), c.width, layers::Activation::Relu));
  }
  parts.push_back(g.slice_rows(seq, 0, 1));
  const Var feats = g.dropout(g.concat_cols(parts), m.config.head_dropout, training, r);
  return layers::dense(g, feats, m.head, layers::Activation::Identity);
}

Relation argmax_relation(const std::array<double, kNumRelations>& p) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < kNumRelations; ++c) {
    if (p[c] > p[best]) best = c;
  }
  return static_cast<Relation>(best);
}

Classification classify_relation(RelModel& m, const RelationInstance& inst) {
  Graph g(false);
  const Tensor& p = g.value(g.softmax_rows(relation_logits(g, m, inst, false, nullptr)));
  Classification out;
  for (std::size_t c = 0; c < kNumRelations; ++c) out.probabilities[c] = p[c];
  out.label = argmax_relation(out.probabilities);
  return out;
}

namespace {

struct StepResult {
  double loss = 0.0;
  bool correct = false;
};

StepResult run_instance(RelModel& m, const RelationInstance& inst, bool training, Rng* rng, double scale) {
  Graph g(training);
  const Var logits = relation_logits(g, m, inst, training, rng);
  const int gold = static_cast<int>(*inst.label);
  const Var loss = g.pick_nll(g.log_softmax_rows(logits), std::vector<int>{gold});
  StepResult r;
  r.loss = g.value(loss)[0];
  if (!std::isfinite(r.loss)) throw NumericError("non-finite loss");
  const Tensor& z = g.value(logits);
  r.correct = argmax_relation({z[0], z[1], z[2]}) == *inst.label;
  if (training) g.backward(g.scale(loss, scale));
  return r;
}

std::vector<const RelationInstance*> labeled(const std::vector<RelationInstance>& data) {
  std::vector<const RelationInstance*> out;
  for (const auto& i : data) {
    if (i.label) out.push_back(&i);
  }
  return out;
}

}  // namespace

std::pair<double, double> evaluate_rel(RelModel& m, const std::vector<RelationInstance>& data) {
  const auto items = labeled(data);
  if (items.empty()) return {0.0, 0.0};
  double loss = 0.0;
  std::size_t correct = 0;
  for (const auto* i : items) {
    const auto r = run_instance(m, *i, false, nullptr, 1.0);
    loss += r.loss;
    correct += r.correct;
  }
  const double n = static_cast<double>(items.size());
  return {loss / n, static_cast<double>(correct) / n};
}

ner::TrainingHistory train_rel(RelModel& m, const std::vector<RelationInstance>& train,
                               const std::vector<RelationInstance>& val, const ner::TrainOptions& opts) {
  ner::TrainingHistory history;
  if (m.config.epochs == 0) return history;
  const auto items = labeled(train);
  if (items.empty()) throw UsageError("train_rel: no labeled training instances");

  auto params = m.parameters();
  num::Optimizer opt({m.config.optimizer, m.config.learning_rate});
  Rng rng(m.config.seed ^ 0x5851f42d4c957f2dULL);
  double best = std::numeric_limits<double>::infinity();
  std::vector<Tensor> best_values;
  for (const auto* p : params) best_values.push_back(p->value);
  std::size_t since_best = 0;
  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= m.config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    const std::size_t bs = m.config.batch_size;
    for (std::size_t b = 0; b < order.size(); b += bs) {
      const std::size_t end = std::min(order.size(), b + bs);
      try {
        num::zero_grads(params);
        const double scale = 1.0 / static_cast<double>(end - b);
        for (std::size_t k = b; k < end; ++k) {
          const auto r = run_instance(m, *items[order[k]], true, &rng, scale);
          loss_sum += r.loss;
          correct += r.correct;
        }
        if (m.config.clip_norm > 0) num::clip_global_norm(params, m.config.clip_norm);
        opt.step(params);
      } catch (const NumericError& e) {
        throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(b / bs + 1) + ")");
      }
    }
    ner::EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(items.size());
    rec.train_acc = static_cast<double>(correct) / static_cast<double>(items.size());
    const bool has_val = !labeled(val).empty();
    if (has_val) std::tie(rec.val_loss, rec.val_acc) = evaluate_rel(m, val);
    history.epochs.push_back(rec);
    if (opts.on_epoch) opts.on_epoch(rec);

    const double monitored = has_val ? rec.val_loss : rec.train_loss;
    if (monitored < best) {
      best = monitored;
      history.best_epoch = epoch;
      for (std::size_t i = 0; i < params.size(); ++i) best_values[i] = params[i]->value;
      since_best = 0;
      if (!opts.checkpoint_path.empty()) save_rel(m, opts.checkpoint_path);
    } else if (++since_best >= m.config.patience) {
      history.stopped_early = epoch < m.config.epochs;
      break;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  num::zero_grads(params);
  return history;
}

// ---------------------------------------------------------------------------

num::Checkpoint to_checkpoint(RelModel& m) {
  num::Checkpoint ck;
  const auto& c = m.config;
  ck.meta["kind"] = "relation";
  ck.meta["hidden"] = std::to_string(c.encoder.hidden);
  ck.meta["heads"] = std::to_string(c.encoder.heads);
  ck.meta["layers"] = std::to_string(c.encoder.layers);
  ck.meta["ffn"] = std::to_string(c.encoder.ffn);
  ck.meta["max_len"] = std::to_string(c.encoder.max_len);
  ck.meta["segments"] = std::to_string(c.encoder.segments);
  ck.meta["kernel_widths"] = std::to_string(c.kernel_widths[0]) + "," + std::to_string(c.kernel_widths[1]) + "," +
                             std::to_string(c.kernel_widths[2]);
  ck.meta["filters"] = std::to_string(c.filters);
  ck.meta["encoder_dropout"] = fmt(c.encoder_dropout);
  ck.meta["head_dropout"] = fmt(c.head_dropout);
  ck.meta["epochs"] = std::to_string(c.epochs);
  ck.meta["learning_rate"] = fmt(c.learning_rate);
  ck.meta["optimizer"] = num::optimizer_name(c.optimizer);
  ck.meta["batch_size"] = std::to_string(c.batch_size);
  ck.meta["clip_norm"] = fmt(c.clip_norm);
  ck.meta["patience"] = std::to_string(c.patience);
  ck.meta["n_per_class"] = std::to_string(c.n_per_class);
  ck.meta["seed"] = std::to_string(c.seed);
  std::string words;
  for (std::size_t i = 0; i < m.vocab.size(); ++i) {
    if (i) words += '\n';
    words += m.vocab.words()[i];
  }
  ck.meta["words"] = words;
  for (auto* p : m.parameters()) ck.put(p->name, p->value);
  return ck;
}

RelModel from_checkpoint(const num::Checkpoint& ck) {
  if (ck.require("kind") != "relation") throw ParseError("checkpoint is not a relation model");
  RelConfig c;
  try {
    auto num = [&](const char* k) { return static_cast<std::size_t>(std::stoull(ck.require(k))); };
    auto real = [&](const char* k) { return std::stod(ck.require(k)); };
    c.encoder.hidden = num("hidden");
    c.encoder.heads = num("heads");
    c.encoder.layers = num("layers");
    c.encoder.ffn = num("ffn");
    c.encoder.max_len = num("max_len");
    c.encoder.segments = num("segments");
    const auto widths = split(ck.require("kernel_widths"), ',');
    if (widths.size() != 3) throw ParseError("kernel_widths needs three values");
    for (std::size_t k = 0; k < 3; ++k) c.kernel_widths[k] = std::stoull(widths[k]);
    c.filters = num("filters");
    c.encoder_dropout = real("encoder_dropout");
    c.head_dropout = real("head_dropout");
    c.epochs = num("epochs");
    c.learning_rate = real("learning_rate");
    c.optimizer = num::parse_optimizer(ck.require("optimizer"));
    c.batch_size = num("batch_size");
    c.clip_norm = real("clip_norm");
    c.patience = num("patience");
    c.n_per_class = num("n_per_class");
    c.seed = std::stoull(ck.require("seed"));
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("bad relation checkpoint metadata: ") + e.what());
  }
  RelModel m = build_rel(c, embed::Vocab::from_words(split(ck.require("words"), '\n')));
  for (auto* p : m.parameters()) {
    const Tensor& t = ck.get(p->name);
    if (!t.same_shape(p->value))
      throw ParseError("checkpoint tensor '" + p->name + "' has shape " + t.shape_str() + ", model expects " +
                       p->value.shape_str());
    p->value = t;
  }
  return m;
}

void save_rel(RelModel& m, const std::string& path) { to_checkpoint(m).save(path); }

RelModel load_rel(const std::string& path) { return from_checkpoint(num::Checkpoint::load(path)); }

}  // namespace medtl::relex
