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

#include "medtl/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "medtl/error.hpp"

namespace medtl::pipeline {

namespace fs = std::filesystem;
using corpus::AnnotatedDocument;
using corpus::EntitySpan;
using medstatus::DatedRelation;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw RangeError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out || !(out << text)) throw RangeError("cannot write " + p.string());
}

std::optional<std::string> slurp_if(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return slurp(p);
}

AnnotatedDocument read_one(const fs::path& txt, corpus::ParseOptions opts) {
  const std::string id = txt.stem().string();
  std::string text = slurp(txt);
  const auto xml = slurp_if(fs::path(txt).replace_extension(".xml"));
  const auto tlink = slurp_if(fs::path(txt).replace_extension(".tlink"));
  const auto med = slurp_if(fs::path(txt).replace_extension(".med"));
  AnnotatedDocument doc = xml ? corpus::parse_2012_annotations(id, text, *xml, tlink.value_or(""), opts)
                              : corpus::make_document(id, text);
  if (med) {
    auto m = corpus::parse_2009_annotations(id, text, *med, opts);
    doc.entities = std::move(m.entities);
    for (auto& w : m.warnings) doc.warnings.push_back(std::move(w));
  }
  return doc;
}

std::set<std::string> anchor_ids(const medstatus::AnchorDates& a) {
  std::set<std::string> ids;
  if (a.admission) ids.insert(a.admission->span.id);
  if (a.discharge) ids.insert(a.discharge->span.id);
  return ids;
}

template <typename F>
Extraction run_all(const std::vector<AnnotatedDocument>& docs, const ExtractOptions& opts, F&& one) {
  Extraction ex;
  ex.id_base = opts.id_base;
  ex.documents.resize(docs.size());
  parallel_for(docs.size(), opts.jobs, [&](std::size_t i) { ex.documents[i] = one(docs[i]); });
  return ex;
}

}  // namespace

// ---------------------------------------------------------------------------

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<corpus::ConllDocument> predict_corpus(ner::NerModel& model, const std::vector<AnnotatedDocument>& docs,
                                                  std::size_t jobs) {
  std::vector<corpus::ConllDocument> out(docs.size());
  parallel_for(docs.size(), jobs, [&](std::size_t d) {
    const auto& doc = docs[d];
    const auto labels = ner::predict_tags(model, doc);
    out[d].doc_id = doc.doc_id;
    for (std::size_t s = 0; s < labels.size(); ++s) {
      const auto [first, last] = doc.tokenized.sentence_tokens[s];
      corpus::LabeledSentence ls;
      for (auto i = first; i < last; ++i) ls.tokens.push_back(doc.tokens()[i].text);
      ls.labels = labels[s];
      out[d].sentences.push_back(std::move(ls));
    }
  });
  return out;
}

relex::CandidateSet gold_candidates(const AnnotatedDocument& doc, const embed::Vocab& vocab, std::size_t window,
                                    std::size_t max_len) {
  std::vector<EntitySpan> dates;
  for (const auto& [id, t] : doc.timexes) {
    if (t.tag == "DATE") dates.push_back(t);
  }
  std::sort(dates.begin(), dates.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start_char < b.start_char; });
  relex::CandidateOptions co;
  co.window = window;
  co.max_len = max_len;
  co.anchor_ids = anchor_ids(medstatus::find_anchor_dates(doc, dates));
  return relex::generate_candidates(doc, vocab, co);
}

void write_corpus_dir(const std::vector<AnnotatedDocument>& docs, const std::string& dir) {
  fs::create_directories(dir);
  for (const auto& d : docs) {
    const fs::path base = fs::path(dir) / d.doc_id;
    spill(fs::path(base).concat(".txt"), d.text);
    if (!d.events.empty() || !d.timexes.empty()) {
      spill(fs::path(base).concat(".xml"), corpus::write_2012_xml(d));
      spill(fs::path(base).concat(".tlink"), corpus::write_tlinks(d));
    }
    if (!d.entities.empty()) spill(fs::path(base).concat(".med"), corpus::write_2009_annotations(d));
  }
}

CorpusDir read_corpus_dir(const std::string& dir, corpus::ParseOptions opts) {
  if (!fs::is_directory(dir)) throw RangeError(dir + " is not a directory");
  std::vector<fs::path> texts;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") texts.push_back(e.path());
  }
  if (texts.empty()) throw RangeError("no .txt documents in " + dir);
  std::sort(texts.begin(), texts.end());
  CorpusDir out;
  for (const auto& t : texts) {
    out.docs.push_back(read_one(t, opts));
    out.warnings += out.docs.back().warnings.size();
  }
  return out;
}

CorpusDir read_inputs(const std::string& path, corpus::ParseOptions opts) {
  if (fs::is_directory(path)) return read_corpus_dir(path, opts);
  if (!fs::exists(path)) throw RangeError(path + " does not exist");
  CorpusDir out;
  out.docs.push_back(read_one(path, opts));
  out.warnings = out.docs.back().warnings.size();
  return out;
}

// ---------------------------------------------------------------------------

std::vector<medstatus::MedStatusRecord> Extraction::records() const {
  std::vector<medstatus::MedStatusRecord> all;
  for (const auto& d : documents) {
    for (auto r : d.records) {
      r.id = id_base + all.size();
      all.push_back(std::move(r));
    }
  }
  return all;
}

std::string Extraction::csv() const { return medstatus::emit_table(records(), id_base); }
std::string Extraction::jsonl() const { return medstatus::emit_jsonl(records(), id_base); }

std::vector<medstatus::MedStatusRecord> medication_records(
    const std::vector<std::pair<EntitySpan, std::vector<DatedRelation>>>& mentions,
    const medstatus::AnchorDates& anchors, std::vector<std::string>& warnings) {
  struct Group {
    std::string name;
    std::vector<DatedRelation> relations;
    std::set<std::pair<std::size_t, std::size_t>> dates;
  };
  std::vector<Group> groups;
  std::map<std::string, std::size_t> index;
  for (const auto& [span, rels] : mentions) {
    const std::string key = lower(span.surface);
    auto [it, fresh] = index.emplace(key, groups.size());
    if (fresh) groups.push_back({span.surface, {}, {}});
    Group& g = groups[it->second];
    for (const auto& r : rels) {
      if (g.dates.insert({r.date.start_char, r.date.end_char}).second) g.relations.push_back(r);
    }
  }

  std::vector<medstatus::MedStatusRecord> out;
  for (const auto& g : groups) {
    const auto decision = medstatus::medication_status(g.relations, anchors);
    if (decision.insufficient_anchor) warnings.push_back(g.name + ": no relation to an anchor date");
    if (decision.textual_fallback) warnings.push_back(g.name + ": dates ordered by text position");
    for (auto& r : medstatus::derive_records(g.name, g.relations, anchors, decision)) out.push_back(std::move(r));
  }
  return out;
}

DocumentRecords extract_gold(const AnnotatedDocument& doc, const ExtractOptions& opts) {
  DocumentRecords out;
  out.doc_id = doc.doc_id;

  std::vector<EntitySpan> dates;
  for (const auto& [id, t] : doc.timexes) {
    if (opts.date_tags.count(t.tag)) dates.push_back(t);
  }
  if (dates.empty()) dates = medstatus::find_dates(doc);
  std::sort(dates.begin(), dates.end(),
            [](const EntitySpan& a, const EntitySpan& b) { return a.start_char < b.start_char; });
  auto anchors = medstatus::find_anchor_dates(doc, dates);
  for (auto& w : anchors.warnings) out.warnings.push_back(doc.doc_id + ": " + w);

  std::map<std::string, const EntitySpan*> by_id;
  for (const auto& d : dates) by_id[d.id] = &d;

  std::vector<const EntitySpan*> meds;
  for (const auto& [id, e] : doc.events) {
    if (opts.medication_tags.count(e.tag)) meds.push_back(&e);
  }
  std::sort(meds.begin(), meds.end(), [](const EntitySpan* a, const EntitySpan* b) {
    return std::tie(a->start_char, a->end_char) < std::tie(b->start_char, b->end_char);
  });

  std::vector<std::pair<EntitySpan, std::vector<DatedRelation>>> mentions;
  for (const EntitySpan* m : meds) {
    std::vector<DatedRelation> rels;
    for (const auto& l : doc.tlinks) {
      if (l.target == m->id && by_id.count(l.source)) {
        rels.push_back({*by_id[l.source], l.relation});
      } else if (l.source == m->id && by_id.count(l.target)) {
        rels.push_back({*by_id[l.target], corpus::invert(l.relation)});
      }
    }
    mentions.emplace_back(*m, std::move(rels));
  }
  std::vector<std::string> warnings;
  out.records = medication_records(mentions, anchors, warnings);
  for (auto& w : warnings) out.warnings.push_back(doc.doc_id + ": " + w);
  return out;
}

Extraction extract_gold(const std::vector<AnnotatedDocument>& docs, const ExtractOptions& opts) {
  return run_all(docs, opts, [&](const AnnotatedDocument& d) { return extract_gold(d, opts); });
}

std::vector<EntitySpan> predict_medications(ner::NerModel& model, const AnnotatedDocument& doc) {
  const std::string tag = model.scheme.has_tag("m") ? "m" : "TREATMENT";
  if (!model.scheme.has_tag(tag)) throw UsageError("the tagger has no medication tag (m or TREATMENT)");
  const auto labels = ner::predict_tags(model, doc);
  const auto& toks = doc.tokens();
  std::vector<EntitySpan> out;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const auto [first, last] = doc.tokenized.sentence_tokens[s];
    std::vector<std::string> words;
    for (auto i = first; i < last; ++i) words.push_back(toks[i].text);
    for (const auto& sp : corpus::iob_to_spans(words, labels[s])) {
      if (sp.tag != tag) continue;
      out.push_back(corpus::span_from_chars(doc, "TREATMENT", toks[first + sp.start_token].start,
                                            toks[first + sp.end_token].end));
    }
  }
  return out;
}

DocumentRecords extract_with_models(const AnnotatedDocument& doc, ner::NerModel& ner_model,
                                    relex::RelModel& rel_model, const ExtractOptions& opts) {
  DocumentRecords out;
  out.doc_id = doc.doc_id;

  // A stripped copy carrying the predicted events and the found dates.
  AnnotatedDocument work;
  work.doc_id = doc.doc_id;
  work.text = doc.text;
  work.tokenized = doc.tokenized;
  auto meds = predict_medications(ner_model, doc);
  for (std::size_t i = 0; i < meds.size(); ++i) {
    meds[i].id = "M" + std::to_string(i);
    work.events[meds[i].id] = meds[i];
  }
  auto dates = medstatus::find_dates(doc);
  for (auto& d : dates) work.timexes[d.id] = d;
  auto anchors = medstatus::find_anchor_dates(doc, dates);
  for (auto& w : anchors.warnings) out.warnings.push_back(doc.doc_id + ": " + w);

  relex::CandidateOptions co;
  co.window = opts.window;
  co.max_len = rel_model.config.encoder.max_len;
  co.anchor_ids = anchor_ids(anchors);
  const auto cands = relex::generate_candidates(work, rel_model.vocab, co);
  for (const auto& w : cands.warnings) out.warnings.push_back(w);

  std::map<std::string, std::vector<DatedRelation>> rels;
  for (const auto& inst : cands.instances) {
    rels[inst.event.id].push_back({inst.time, relex::classify_relation(rel_model, inst).label});
  }
  std::vector<std::pair<EntitySpan, std::vector<DatedRelation>>> mentions;
  for (const auto& m : meds) mentions.emplace_back(m, rels[m.id]);
  std::vector<std::string> warnings;
  out.records = medication_records(mentions, anchors, warnings);
  for (auto& w : warnings) out.warnings.push_back(doc.doc_id + ": " + w);
  return out;
}

Extraction extract_with_models(const std::vector<AnnotatedDocument>& docs, ner::NerModel& ner_model,
                               relex::RelModel& rel_model, const ExtractOptions& opts) {
  return run_all(docs, opts,
                 [&](const AnnotatedDocument& d) { return extract_with_models(d, ner_model, rel_model, opts); });
}

}  // namespace medtl::pipeline
