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

// medtimeline: command-line front end over the C library.
//
//   medtimeline fixture --n 10 --out d/
//   medtimeline ingest d/
//   medtimeline train-ner --data d/ --out ner.ckpt
//   medtimeline train-rel --data d/ --out rel.ckpt
//   medtimeline extract --ner ner.ckpt --rel rel.ckpt --in doc.txt --out t.csv
//   medtimeline extract --gold --in d/ --out t.csv
//   medtimeline eval --gold g.conll --pred p.conll
//   medtimeline verify
//
// Data goes to files or standard output, logs to standard error.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "medtl/medtl.h"

namespace {

struct Globals {
  std::uint64_t seed = 1;
  bool deterministic = false;
  std::size_t jobs = 1;
  std::string config;
  std::vector<std::string> overrides;
  int verbosity = 1;  // 0 quiet, 2 verbose
};

Globals g;

void log(int level, const std::string& msg) {
  if (level > g.verbosity) return;
  std::string stamp;
  if (!g.deterministic) {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S ", std::localtime(&t));
    stamp = buf;
  }
  std::cerr << stamp << "medtimeline: " << msg << '\n';
}

// Carries a library status out of a command.
struct Failure {
  medtl_status status;
  std::string message;
};

void check(medtl_status st, const std::string& context = {}) {
  if (st == MEDTL_OK) return;
  throw Failure{st, (context.empty() ? "" : context + ": ") + medtl_last_error()};
}

struct CString {
  char* p = nullptr;
  ~CString() { medtl_string_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Settings = Handle<medtl_settings, medtl_settings_free>;
using Corpus = Handle<medtl_corpus, medtl_corpus_free>;
using Ner = Handle<medtl_ner, medtl_ner_free>;
using Rel = Handle<medtl_rel, medtl_rel_free>;

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{MEDTL_ERR_DATA, "cannot write " + path};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{MEDTL_ERR_DATA, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config file first, then --set, then the dedicated flags given by `extra`.
void load_settings(Settings& s, const std::vector<std::pair<std::string, std::string>>& extra, bool seed_given) {
  check(medtl_settings_new(&s.p));
  if (!g.config.empty()) check(medtl_settings_load_file(s.p, g.config.c_str()), g.config);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{MEDTL_ERR_USAGE, "--set expects key=value, got '" + kv + "'"};
    check(medtl_settings_set(s.p, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
  }
  if (seed_given) check(medtl_settings_set_seed(s.p, g.seed));
  for (const auto& [k, v] : extra) check(medtl_settings_set(s.p, k.c_str(), v.c_str()));
  if (g.verbosity >= 2) {
    CString dump;
    check(medtl_settings_dump(s.p, dump.out()));
    std::istringstream in(dump.str());
    for (std::string line; std::getline(in, line);) log(2, "setting " + line);
  }
}

void read_corpus(Corpus& c, const std::string& path, bool lenient = false) {
  check(medtl_corpus_read(path.c_str(), lenient ? 1 : 0, &c.p), path);
  log(1, "read " + std::to_string(medtl_corpus_size(c.p)) + " documents from " + path);
}

void log_lines(const std::string& text, int level = 1) {
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) log(level, line);
}

// Summaries go to standard output unless the data does.
void summary(const std::string& text, bool data_on_stdout) {
  if (data_on_stdout) {
    log_lines(text);
  } else {
    std::cout << text << std::flush;
  }
}

bool to_stdout(const std::string& path) { return path.empty() || path == "-"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clinical medication timeline extraction"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(medtl_version()));
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for fixtures, splits, initialisation and shuffling");
  app.add_flag("--deterministic", g.deterministic, "Suppress timestamps in logs");
  app.add_option("--jobs", g.jobs, "Documents processed in parallel during inference")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "Settings file (key = value with [ner], [rel], [extract], [split])")
      ->check(CLI::ExistingFile);
  app.add_option("--set", g.overrides, "Override one setting, e.g. --set ner.max_epochs=5");
  app.add_flag_callback("-v,--verbose", [] { g.verbosity = 2; }, "More logging");
  app.add_flag_callback("-q,--quiet", [] { g.verbosity = 0; }, "Errors only");

  // fixture
  std::size_t fx_n = 10;
  std::string fx_out;
  auto* fixture = app.add_subcommand("fixture", "Write a synthetic annotated corpus");
  fixture->add_option("--n", fx_n, "Number of documents")->check(CLI::PositiveNumber);
  fixture->add_option("--out", fx_out, "Output directory")->required();

  // ingest
  std::string in_path, in_conll;
  bool in_lenient = false, in_show = false;
  auto* ingest = app.add_subcommand("ingest", "Parse a corpus and report counts and warnings");
  ingest->add_option("path", in_path, "Document or corpus directory")->required();
  ingest->add_flag("--lenient", in_lenient, "Skip and count unparseable annotation lines");
  ingest->add_flag("--show-warnings", in_show, "List every warning");
  ingest->add_option("--conll", in_conll, "Write the gold IOB labels here");
  std::string in_scheme;
  ingest->add_option("--scheme", in_scheme, "Tag set for --conll: 2009 or 2012")->check(CLI::IsMember({"2009", "2012"}));

  // train-ner
  std::string tn_data, tn_out, tn_history, tn_arch, tn_scheme;
  std::size_t tn_epochs = 0;
  auto* train_ner = app.add_subcommand("train-ner", "Train a BiLSTM-CRF or CNN-BiLSTM tagger");
  train_ner->add_option("--data", tn_data, "Training corpus")->required();
  train_ner->add_option("--out", tn_out, "Checkpoint to write")->required();
  train_ner->add_option("--history", tn_history, "Per-epoch CSV");
  train_ner->add_option("--arch", tn_arch, "bilstm-crf or cnn-bilstm");
  train_ner->add_option("--scheme", tn_scheme, "2009 or 2012")->check(CLI::IsMember({"2009", "2012"}));
  train_ner->add_option("--epochs", tn_epochs, "Epoch limit");

  // train-rel
  std::string tr_data, tr_out, tr_history;
  std::size_t tr_epochs = 0, tr_npc = 0;
  auto* train_rel = app.add_subcommand("train-rel", "Train the temporal relation classifier");
  train_rel->add_option("--data", tr_data, "Training corpus with TLINKs")->required();
  train_rel->add_option("--out", tr_out, "Checkpoint to write")->required();
  train_rel->add_option("--history", tr_history, "Per-epoch CSV");
  train_rel->add_option("--epochs", tr_epochs, "Epoch limit");
  train_rel->add_option("--n-per-class", tr_npc, "Training instances per class after down-sampling");

  // predict
  std::string pr_ner, pr_rel, pr_in, pr_out;
  auto* predict = app.add_subcommand("predict", "Tag documents, or classify their relation candidates");
  predict->add_option("--ner", pr_ner, "Tagger checkpoint; writes CoNLL");
  predict->add_option("--rel", pr_rel, "Classifier checkpoint; writes one line per candidate pair");
  predict->add_option("--in", pr_in, "Document or corpus directory")->required();
  predict->add_option("--out", pr_out, "Output file (default standard output)");

  // extract
  std::string ex_ner, ex_rel, ex_in, ex_out, ex_format = "csv";
  bool ex_gold = false;
  std::size_t ex_id_base = 0;
  auto* extract = app.add_subcommand("extract", "Medication status table (ID,Event,Status,Start,Stop)");
  extract->add_option("--in", ex_in, "Document or corpus directory")->required();
  extract->add_option("--out", ex_out, "Output file (default standard output)");
  extract->add_flag("--gold", ex_gold, "Use the corpus's own annotations instead of models");
  extract->add_option("--ner", ex_ner, "Tagger checkpoint");
  extract->add_option("--rel", ex_rel, "Classifier checkpoint");
  extract->add_option("--format", ex_format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  auto* id_base_opt = extract->add_option("--id-base", ex_id_base, "First record id");

  // eval
  std::string ev_gold, ev_pred, ev_out;
  bool ev_padding = false, ev_json = false;
  auto* eval = app.add_subcommand("eval", "Exact-match scores of predicted against gold CoNLL labels");
  eval->add_option("--gold", ev_gold, "Gold CoNLL file")->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", ev_pred, "Predicted CoNLL file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--include-padding", ev_padding, "Count PAD positions");
  eval->add_flag("--json", ev_json, "JSON instead of a text table");
  eval->add_option("--out", ev_out, "Output file (default standard output)");

  // verify
  std::string vf_suite = "all";
  auto* verify = app.add_subcommand("verify", "Run the built-in verification suites");
  verify->add_option("--suite", vf_suite, "Suite name, or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return MEDTL_ERR_USAGE;
  }
  const bool seed_given = seed_opt->count() > 0;

  try {
    // A bad config file or --set fails every subcommand, not only those that read settings.
    if (!g.config.empty() || !g.overrides.empty()) {
      const int verbosity = std::exchange(g.verbosity, 0);
      Settings s;
      load_settings(s, {}, seed_given);
      g.verbosity = verbosity;
    }
    if (fixture->parsed()) {
      Corpus c;
      check(medtl_corpus_fixture(fx_n, g.seed, &c.p));
      check(medtl_corpus_write(c.p, fx_out.c_str()), fx_out);
      std::cout << "wrote " << medtl_corpus_size(c.p) << " documents to " << fx_out << " (seed " << g.seed << ")\n";
    } else if (ingest->parsed()) {
      Corpus c;
      read_corpus(c, in_path, in_lenient);
      CString text;
      check(medtl_corpus_summary(c.p, text.out()));
      std::cout << text.str();
      if (in_show) {
        CString w;
        check(medtl_corpus_warnings(c.p, w.out()));
        std::cout << w.str();
      }
      if (!in_conll.empty()) {
        Settings s;
        std::vector<std::pair<std::string, std::string>> extra;
        if (!in_scheme.empty()) extra.emplace_back("ner.scheme", in_scheme);
        load_settings(s, extra, seed_given);
        CString conll;
        check(medtl_corpus_conll(c.p, s.p, conll.out()));
        write_output(in_conll, conll.str());
      }
    } else if (train_ner->parsed()) {
      Settings s;
      std::vector<std::pair<std::string, std::string>> extra;
      if (!tn_arch.empty()) extra.emplace_back("ner.architecture", tn_arch);
      if (!tn_scheme.empty()) extra.emplace_back("ner.scheme", tn_scheme);
      if (tn_epochs) extra.emplace_back("ner.max_epochs", std::to_string(tn_epochs));
      load_settings(s, extra, seed_given);
      Corpus c;
      read_corpus(c, tn_data);
      CString history, text;
      log(1, "training tagger");
      check(medtl_ner_train(c.p, s.p, tn_out.c_str(), history.out(), text.out()));
      if (!tn_history.empty()) write_output(tn_history, history.str());
      std::cout << text.str() << "checkpoint " << tn_out << "\n";
    } else if (train_rel->parsed()) {
      Settings s;
      std::vector<std::pair<std::string, std::string>> extra;
      if (tr_epochs) extra.emplace_back("rel.epochs", std::to_string(tr_epochs));
      if (tr_npc) extra.emplace_back("rel.n_per_class", std::to_string(tr_npc));
      load_settings(s, extra, seed_given);
      Corpus c;
      read_corpus(c, tr_data);
      CString history, text;
      log(1, "training relation classifier");
      check(medtl_rel_train(c.p, s.p, tr_out.c_str(), history.out(), text.out()));
      if (!tr_history.empty()) write_output(tr_history, history.str());
      std::cout << text.str() << "checkpoint " << tr_out << "\n";
    } else if (predict->parsed()) {
      if (pr_ner.empty() == pr_rel.empty()) throw Failure{MEDTL_ERR_USAGE, "predict needs exactly one of --ner, --rel"};
      Settings s;
      load_settings(s, {}, seed_given);
      Corpus c;
      read_corpus(c, pr_in);
      CString out;
      if (!pr_ner.empty()) {
        Ner m;
        check(medtl_ner_load(pr_ner.c_str(), &m.p), pr_ner);
        check(medtl_ner_predict(m.p, c.p, g.jobs, out.out()));
      } else {
        Rel m;
        check(medtl_rel_load(pr_rel.c_str(), &m.p), pr_rel);
        check(medtl_rel_classify(m.p, c.p, s.p, out.out()));
      }
      write_output(pr_out, out.str());
      summary("predicted " + std::to_string(medtl_corpus_size(c.p)) + " documents\n", to_stdout(pr_out));
    } else if (extract->parsed()) {
      const bool models = !ex_ner.empty() || !ex_rel.empty();
      if (ex_gold == models) throw Failure{MEDTL_ERR_USAGE, "extract needs either --gold or both --ner and --rel"};
      if (models && (ex_ner.empty() || ex_rel.empty()))
        throw Failure{MEDTL_ERR_USAGE, "extract needs both --ner and --rel"};
      Settings s;
      std::vector<std::pair<std::string, std::string>> extra;
      if (id_base_opt->count()) extra.emplace_back("extract.id_base", std::to_string(ex_id_base));
      load_settings(s, extra, seed_given);
      Corpus c;
      read_corpus(c, ex_in);
      Ner ner;
      Rel rel;
      if (models) {
        check(medtl_ner_load(ex_ner.c_str(), &ner.p), ex_ner);
        check(medtl_rel_load(ex_rel.c_str(), &rel.p), ex_rel);
      }
      CString table, warnings;
      const auto format = ex_format == "jsonl" ? MEDTL_FORMAT_JSONL : MEDTL_FORMAT_CSV;
      check(medtl_extract(c.p, ner.p, rel.p, s.p, g.jobs, format, table.out(), warnings.out()));
      write_output(ex_out, table.str());
      log_lines(warnings.str(), 2);
      std::size_t rows = 0;
      for (char ch : table.str()) rows += ch == '\n';
      if (format == MEDTL_FORMAT_CSV) --rows;
      std::size_t n_warn = 0;
      for (char ch : warnings.str()) n_warn += ch == '\n';
      summary("extracted " + std::to_string(rows) + " records from " + std::to_string(medtl_corpus_size(c.p)) +
                  " documents (" + (models ? "models" : "gold annotations") + "), " + std::to_string(n_warn) +
                  " warnings\n",
              to_stdout(ex_out));
    } else if (eval->parsed()) {
      CString report;
      check(medtl_eval_conll(read_file(ev_gold).c_str(), read_file(ev_pred).c_str(), ev_padding, ev_json,
                             report.out()));
      write_output(ev_out, report.str());
    } else if (verify->parsed()) {
      CString report;
      const medtl_status st = medtl_verify(vf_suite.c_str(), g.seed, report.out());
      std::cout << report.str() << std::flush;
      check(st, "verify");
    }
  } catch (const Failure& f) {
    std::cerr << "medtimeline: error: " << f.message << '\n';
    return f.status;
  }
  return 0;
}
