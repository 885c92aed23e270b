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

#include "medtl/medtl.h"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>

#include "json.hpp"
#include "medtl/error.hpp"
#include "medtl/evalkit.hpp"
#include "medtl/pipeline.hpp"
#include "medtl/settings.hpp"
#include "medtl/verify.hpp"

using namespace medtl;

struct medtl_settings {
  Settings s;
};
struct medtl_corpus {
  std::vector<corpus::AnnotatedDocument> docs;
  std::size_t warnings = 0;
};
struct medtl_ner {
  ner::NerModel model;
};
struct medtl_rel {
  relex::RelModel model;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
medtl_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return MEDTL_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<medtl_status>(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return MEDTL_ERR_DATA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return MEDTL_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return MEDTL_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return MEDTL_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw UsageError(std::string(what) + " is NULL");
}

void put(char** out, const std::string& s) {
  if (!out) return;
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  *out = p;
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

const Settings& settings_or_default(const medtl_settings* s) {
  static const Settings none;
  return s ? s->s : none;
}

struct SplitDocs {
  std::vector<corpus::AnnotatedDocument> train, val, test;
};

// With fewer than three documents everything trains and nothing validates.
SplitDocs split_docs(const std::vector<corpus::AnnotatedDocument>& docs, const Settings& s) {
  SplitDocs out;
  if (docs.size() < 3) {
    out.train = docs;
    return out;
  }
  const auto sp = corpus::split_corpus(docs.size(), s.split_seed(), s.split_ratios());
  for (auto i : sp.train) out.train.push_back(docs[i]);
  for (auto i : sp.val) out.val.push_back(docs[i]);
  for (auto i : sp.test) out.test.push_back(docs[i]);
  return out;
}

std::string history_summary(const ner::TrainingHistory& h) {
  std::string out = "epochs run " + std::to_string(h.epochs.size()) + ", best epoch " + std::to_string(h.best_epoch);
  if (h.stopped_early) out += ", stopped early";
  out += "\n";
  if (h.best_epoch > 0) {
    const auto& e = h.epochs[h.best_epoch - 1];
    out += "best epoch train loss " + fixed(e.train_loss) + ", train accuracy " + fixed(e.train_acc) +
           ", val loss " + fixed(e.val_loss) + ", val accuracy " + fixed(e.val_acc) + "\n";
  }
  return out;
}

std::vector<relex::RelationInstance> labeled_candidates(const std::vector<corpus::AnnotatedDocument>& docs,
                                                        const embed::Vocab& vocab, std::size_t window,
                                                        std::size_t max_len, std::size_t* skipped = nullptr) {
  std::vector<relex::RelationInstance> out;
  for (const auto& d : docs) {
    auto c = pipeline::gold_candidates(d, vocab, window, max_len);
    if (skipped) *skipped += c.skipped_overflow;
    for (auto& i : c.instances) {
      if (i.label) out.push_back(std::move(i));
    }
  }
  return out;
}

}  // namespace

extern "C" {

const char* medtl_version(void) { return "1.0.0"; }

const char* medtl_last_error(void) { return g_last_error.c_str(); }

void medtl_string_free(char* s) { std::free(s); }

// ---------------------------------------------------------------------------

medtl_status medtl_settings_new(medtl_settings** out) {
  return guard([&] {
    require(out, "out");
    *out = new medtl_settings;
  });
}

void medtl_settings_free(medtl_settings* s) { delete s; }

medtl_status medtl_settings_load_file(medtl_settings* s, const char* path) {
  return guard([&] {
    require(s, "settings");
    require(path, "path");
    s->s.load_file(path);
  });
}

medtl_status medtl_settings_load_text(medtl_settings* s, const char* text) {
  return guard([&] {
    require(s, "settings");
    require(text, "text");
    s->s.load_text(text);
  });
}

medtl_status medtl_settings_set(medtl_settings* s, const char* key, const char* value) {
  return guard([&] {
    require(s, "settings");
    require(key, "key");
    require(value, "value");
    s->s.set(key, value);
  });
}

medtl_status medtl_settings_set_seed(medtl_settings* s, uint64_t seed) {
  return guard([&] {
    require(s, "settings");
    s->s.set_seed(seed);
  });
}

medtl_status medtl_settings_describe(char** out) {
  return guard([&] {
    require(out, "out");
    std::string text;
    for (const auto& [k, d] : Settings::known_keys()) text += k + "\t" + d + "\n";
    put(out, text);
  });
}

medtl_status medtl_settings_dump(const medtl_settings* s, char** out) {
  return guard([&] {
    require(s, "settings");
    require(out, "out");
    std::string text;
    for (const auto& [k, v] : s->s.values()) text += k + " = " + v + "\n";
    put(out, text);
  });
}

// ---------------------------------------------------------------------------

medtl_status medtl_corpus_fixture(size_t n_docs, uint64_t seed, medtl_corpus** out) {
  return guard([&] {
    require(out, "out");
    auto c = std::make_unique<medtl_corpus>();
    c->docs = corpus::generate_fixture_corpus({n_docs, seed});
    *out = c.release();
  });
}

medtl_status medtl_corpus_read(const char* path, int lenient, medtl_corpus** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    corpus::ParseOptions po;
    po.lenient = lenient != 0;
    auto dir = pipeline::read_inputs(path, po);
    auto c = std::make_unique<medtl_corpus>();
    c->docs = std::move(dir.docs);
    c->warnings = dir.warnings;
    *out = c.release();
  });
}

medtl_status medtl_corpus_write(const medtl_corpus* c, const char* dir) {
  return guard([&] {
    require(c, "corpus");
    require(dir, "dir");
    pipeline::write_corpus_dir(c->docs, dir);
  });
}

void medtl_corpus_free(medtl_corpus* c) { delete c; }

size_t medtl_corpus_size(const medtl_corpus* c) { return c ? c->docs.size() : 0; }

size_t medtl_corpus_warning_count(const medtl_corpus* c) { return c ? c->warnings : 0; }

medtl_status medtl_corpus_summary(const medtl_corpus* c, char** out) {
  return guard([&] {
    require(c, "corpus");
    std::size_t sentences = 0, tokens = 0, entities = 0, events = 0, timexes = 0, tlinks = 0;
    for (const auto& d : c->docs) {
      sentences += d.tokenized.sentence_tokens.size();
      tokens += d.tokens().size();
      entities += d.entities.size();
      events += d.events.size();
      timexes += d.timexes.size();
      tlinks += d.tlinks.size();
    }
    put(out, std::to_string(c->docs.size()) + " documents, " + std::to_string(c->warnings) + " warnings\n" +
                 std::to_string(sentences) + " sentences, " + std::to_string(tokens) + " tokens\n" +
                 std::to_string(entities) + " medication entries, " + std::to_string(events) + " events, " +
                 std::to_string(timexes) + " timexes, " + std::to_string(tlinks) + " tlinks\n");
  });
}

medtl_status medtl_corpus_warnings(const medtl_corpus* c, char** out) {
  return guard([&] {
    require(c, "corpus");
    std::string text;
    for (const auto& d : c->docs) {
      for (const auto& w : d.warnings) text += d.doc_id + ": " + w + "\n";
    }
    put(out, text);
  });
}

medtl_status medtl_corpus_conll(const medtl_corpus* c, const medtl_settings* s, char** out) {
  return guard([&] {
    require(c, "corpus");
    const auto& scheme = settings_or_default(s).ner_scheme();
    std::vector<corpus::ConllDocument> docs;
    for (const auto& d : c->docs) docs.push_back(corpus::to_conll(d, scheme));
    put(out, corpus::write_conll(docs));
  });
}

// ---------------------------------------------------------------------------

medtl_status medtl_ner_train(const medtl_corpus* c, const medtl_settings* s, const char* checkpoint_path,
                             char** history_csv, char** summary) {
  return guard([&] {
    require(c, "corpus");
    require(checkpoint_path, "checkpoint_path");
    const Settings& st = settings_or_default(s);
    const auto config = st.ner_config();
    const auto& scheme = st.ner_scheme();
    const auto split = split_docs(c->docs, st);
    const auto train = ner::labeled_sentences(split.train, scheme);
    const auto val = ner::labeled_sentences(split.val, scheme);
    const auto test = ner::labeled_sentences(split.test, scheme);
    if (train.empty()) throw RangeError("no training sentences");

    ner::NerVocabs vocabs;
    if (config.embedding == ner::EmbeddingSource::Pretrained) {
      const auto path = st.get("ner.vectors");
      if (!path) throw UsageError("pretrained embeddings need ner.vectors");
      vocabs = ner::pretrained_vocabs(embed::load_pretrained(*path, config.word_dim), train);
    } else {
      vocabs = ner::build_vocabs(train, config);
    }
    auto model = ner::build_ner(config, std::move(vocabs), scheme);
    ner::TrainOptions opts;
    opts.checkpoint_path = checkpoint_path;
    const auto h = ner::train_ner(model, train, val, opts);
    ner::save_ner(model, checkpoint_path);

    std::string text = std::string("architecture ") + ner::architecture_name(config.architecture) + ", " +
                       std::to_string(model.parameter_count()) + " parameters\n" + "sentences train " +
                       std::to_string(train.size()) + ", val " + std::to_string(val.size()) + ", test " +
                       std::to_string(test.size()) + "\n" + history_summary(h);
    if (!test.empty()) {
      const auto [loss, acc] = ner::evaluate_ner(model, test);
      text += "test loss " + fixed(loss) + ", test accuracy " + fixed(acc) + "\n";
    }
    put(history_csv, h.to_csv());
    put(summary, text);
  });
}

medtl_status medtl_ner_load(const char* checkpoint_path, medtl_ner** out) {
  return guard([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new medtl_ner{ner::load_ner(checkpoint_path)};
  });
}

void medtl_ner_free(medtl_ner* m) { delete m; }

medtl_status medtl_ner_predict(medtl_ner* m, const medtl_corpus* c, size_t jobs, char** conll) {
  return guard([&] {
    require(m, "tagger");
    require(c, "corpus");
    put(conll, corpus::write_conll(pipeline::predict_corpus(m->model, c->docs, jobs)));
  });
}

// ---------------------------------------------------------------------------

medtl_status medtl_rel_train(const medtl_corpus* c, const medtl_settings* s, const char* checkpoint_path,
                             char** history_csv, char** summary) {
  return guard([&] {
    require(c, "corpus");
    require(checkpoint_path, "checkpoint_path");
    const Settings& st = settings_or_default(s);
    const auto config = st.rel_config();
    const auto split = split_docs(c->docs, st);
    auto vocab = relex::build_relation_vocab(split.train);
    const std::size_t window = st.rel_window(), max_len = config.encoder.max_len;

    std::size_t skipped = 0;
    const auto pool = labeled_candidates(split.train, vocab, window, max_len, &skipped);
    const auto counts = relex::class_counts(pool);
    const std::size_t smallest = *std::min_element(counts.begin(), counts.end());
    if (smallest == 0) {
      std::string msg = "every relation class needs training instances; counts";
      for (std::size_t k = 0; k < relex::kNumRelations; ++k)
        msg += std::string(" ") + corpus::relation_name(static_cast<corpus::Relation>(k)) + "=" +
               std::to_string(counts[k]);
      throw RangeError(msg);
    }
    const std::size_t n = std::min(config.n_per_class, smallest);
    const auto train = relex::downsample_balanced(pool, n, config.seed);
    const auto val = labeled_candidates(split.val, vocab, window, max_len);
    const auto test = labeled_candidates(split.test, vocab, window, max_len);

    auto model = relex::build_rel(config, std::move(vocab));
    ner::TrainOptions opts;
    opts.checkpoint_path = checkpoint_path;
    const auto h = relex::train_rel(model, train, val, opts);
    relex::save_rel(model, checkpoint_path);

    std::string text = std::to_string(model.parameter_count()) + " parameters\n" + "candidates AFTER " +
                       std::to_string(counts[0]) + ", OVERLAP " + std::to_string(counts[1]) + ", BEFORE " +
                       std::to_string(counts[2]) + ", over length " + std::to_string(skipped) + "\n" +
                       "training instances " + std::to_string(train.size()) + " (" + std::to_string(n) +
                       " per class), val " + std::to_string(val.size()) + ", test " + std::to_string(test.size()) +
                       "\n" + history_summary(h);
    if (!test.empty()) {
      const auto [loss, acc] = relex::evaluate_rel(model, test);
      text += "test loss " + fixed(loss) + ", test accuracy " + fixed(acc) + "\n";
    }
    put(history_csv, h.to_csv());
    put(summary, text);
  });
}

medtl_status medtl_rel_load(const char* checkpoint_path, medtl_rel** out) {
  return guard([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = new medtl_rel{relex::load_rel(checkpoint_path)};
  });
}

void medtl_rel_free(medtl_rel* m) { delete m; }

medtl_status medtl_rel_classify(medtl_rel* m, const medtl_corpus* c, const medtl_settings* s, char** out) {
  return guard([&] {
    require(m, "classifier");
    require(c, "corpus");
    const std::size_t window = settings_or_default(s).rel_window();
    std::string text = "doc\tevent\ttime\tpredicted\tgold\n";
    for (const auto& d : c->docs) {
      for (const auto& i : pipeline::gold_candidates(d, m->model.vocab, window, m->model.config.encoder.max_len)
                               .instances) {
        const auto r = relex::classify_relation(m->model, i);
        text += d.doc_id + "\t" + i.event.surface + "\t" + i.time.surface + "\t" + corpus::relation_name(r.label) +
                "\t" + (i.label ? corpus::relation_name(*i.label) : "-") + "\n";
      }
    }
    put(out, text);
  });
}

// ---------------------------------------------------------------------------

medtl_status medtl_extract(const medtl_corpus* c, medtl_ner* ner, medtl_rel* rel, const medtl_settings* s,
                           size_t jobs, medtl_format format, char** table, char** log) {
  return guard([&] {
    require(c, "corpus");
    if ((ner == nullptr) != (rel == nullptr)) throw UsageError("model extraction needs both a tagger and a classifier");
    if (format != MEDTL_FORMAT_CSV && format != MEDTL_FORMAT_JSONL) throw UsageError("unknown output format");
    auto opts = settings_or_default(s).extract_options();
    opts.jobs = jobs;
    const auto ex = ner ? pipeline::extract_with_models(c->docs, ner->model, rel->model, opts)
                        : pipeline::extract_gold(c->docs, opts);
    std::string warnings;
    for (const auto& d : ex.documents) {
      for (const auto& w : d.warnings) warnings += w + "\n";
    }
    put(table, format == MEDTL_FORMAT_CSV ? ex.csv() : ex.jsonl());
    put(log, warnings);
  });
}

medtl_status medtl_eval_conll(const char* gold, const char* pred, int include_padding, int json, char** report) {
  return guard([&] {
    require(gold, "gold");
    require(pred, "pred");
    const auto r = evalkit::evaluate_conll(corpus::read_conll(gold), corpus::read_conll(pred), include_padding != 0);
    if (json) {
      nlohmann::ordered_json j;
      j["token"] = nlohmann::ordered_json::parse(evalkit::to_json(r.tokens));
      j["span"] = nlohmann::ordered_json::parse(evalkit::to_json(r.spans));
      put(report, j.dump(2) + "\n");
      return;
    }
    const auto& o = r.spans.overall_metrics;
    put(report, "token-level exact match" + std::string(r.tokens.padding_included ? " (padding included)" : "") +
                    "\n" + evalkit::format_table(r.tokens) + "\nspan-level exact match: precision " +
                    fixed(100 * o.precision, 2) + ", recall " + fixed(100 * o.recall, 2) + ", f1 " +
                    fixed(100 * o.f1, 2) + " (" + std::to_string(r.spans.overall.support) + " gold spans)\n");
  });
}

medtl_status medtl_verify(const char* suite, uint64_t seed, char** report) {
  bool ok = true;
  const medtl_status st = guard([&] {
    std::vector<verify::SuiteResult> results;
    if (suite == nullptr || std::strcmp(suite, "all") == 0) {
      results = verify::run_all(seed);
    } else {
      results.push_back(verify::run_suite(suite, seed));
    }
    for (const auto& r : results) ok = ok && r.passed;
    put(report, verify::format_results(results));
  });
  if (st != MEDTL_OK || ok) return st;
  g_last_error = "verification failed";
  return MEDTL_ERR_VERIFICATION;
}

medtl_status medtl_verify_suites(char** out) {
  return guard([&] {
    std::string text;
    for (const auto& n : verify::suite_names()) text += n + "\n";
    put(out, text);
  });
}

}  // extern "C"
