/* Copyright 2026 The medtimeline Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the medtimeline library.
 *
 * Every call returns a medtl_status. On failure the message is available
 * from medtl_last_error() on the same thread until the next failing call.
 * Strings returned through char** are owned by the caller and released with
 * medtl_string_free(). Handles are released with their *_free function;
 * passing NULL to any *_free is a no-op.
 */

#ifndef MEDTL_H
#define MEDTL_H

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define MEDTL_API __attribute__((visibility("default")))
#else
#define MEDTL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the command-line exit codes. */
typedef enum medtl_status {
  MEDTL_OK = 0,
  MEDTL_ERR_USAGE = 1,
  MEDTL_ERR_DATA = 2,
  MEDTL_ERR_NUMERIC = 3,
  MEDTL_ERR_VERIFICATION = 4,
  MEDTL_ERR_INTERNAL = 5
} medtl_status;

typedef enum medtl_format { MEDTL_FORMAT_CSV = 0, MEDTL_FORMAT_JSONL = 1 } medtl_format;

typedef struct medtl_settings medtl_settings;
typedef struct medtl_corpus medtl_corpus;
typedef struct medtl_ner medtl_ner;
typedef struct medtl_rel medtl_rel;

MEDTL_API const char* medtl_version(void);
MEDTL_API const char* medtl_last_error(void);
MEDTL_API void medtl_string_free(char* s);

/* Settings: "section.key" = value. See medtl_settings_describe for keys. */
MEDTL_API medtl_status medtl_settings_new(medtl_settings** out);
MEDTL_API void medtl_settings_free(medtl_settings* s);
MEDTL_API medtl_status medtl_settings_load_file(medtl_settings* s, const char* path);
MEDTL_API medtl_status medtl_settings_load_text(medtl_settings* s, const char* text);
MEDTL_API medtl_status medtl_settings_set(medtl_settings* s, const char* key, const char* value);
MEDTL_API medtl_status medtl_settings_set_seed(medtl_settings* s, uint64_t seed);
/* Known keys with a short description, one per line. */
MEDTL_API medtl_status medtl_settings_describe(char** out);
/* Effective values, one "key = value" per line. */
MEDTL_API medtl_status medtl_settings_dump(const medtl_settings* s, char** out);

/* Corpora. A path is a plain-text document or a directory of <id>.txt files
 * with optional <id>.xml, <id>.tlink and <id>.med annotations. */
MEDTL_API medtl_status medtl_corpus_fixture(size_t n_docs, uint64_t seed, medtl_corpus** out);
MEDTL_API medtl_status medtl_corpus_read(const char* path, int lenient, medtl_corpus** out);
MEDTL_API medtl_status medtl_corpus_write(const medtl_corpus* c, const char* dir);
MEDTL_API void medtl_corpus_free(medtl_corpus* c);
MEDTL_API size_t medtl_corpus_size(const medtl_corpus* c);
MEDTL_API size_t medtl_corpus_warning_count(const medtl_corpus* c);
/* Document, sentence, token and annotation counts. */
MEDTL_API medtl_status medtl_corpus_summary(const medtl_corpus* c, char** out);
/* "<doc_id>: <warning>" lines. */
MEDTL_API medtl_status medtl_corpus_warnings(const medtl_corpus* c, char** out);
/* Gold IOB labels in CoNLL form, using the tag set of ner.scheme. */
MEDTL_API medtl_status medtl_corpus_conll(const medtl_corpus* c, const medtl_settings* s, char** out);

/* Tagger. Training splits the corpus with the split.* settings, trains on
 * the training part with early stopping on the validation part and writes
 * the best parameters to checkpoint_path. history_csv and summary may be
 * NULL. */
MEDTL_API medtl_status medtl_ner_train(const medtl_corpus* c, const medtl_settings* s, const char* checkpoint_path,
                                       char** history_csv, char** summary);
MEDTL_API medtl_status medtl_ner_load(const char* checkpoint_path, medtl_ner** out);
MEDTL_API void medtl_ner_free(medtl_ner* m);
/* Predicted labels in CoNLL form; documents run on up to `jobs` threads. */
MEDTL_API medtl_status medtl_ner_predict(medtl_ner* m, const medtl_corpus* c, size_t jobs, char** conll);

/* Relation classifier, trained on the labeled (time, event) candidates. */
MEDTL_API medtl_status medtl_rel_train(const medtl_corpus* c, const medtl_settings* s, const char* checkpoint_path,
                                       char** history_csv, char** summary);
MEDTL_API medtl_status medtl_rel_load(const char* checkpoint_path, medtl_rel** out);
MEDTL_API void medtl_rel_free(medtl_rel* m);
/* Candidate pairs of the corpus, one line each: doc, event, time, predicted
 * relation. Gold labels are added when present. */
MEDTL_API medtl_status medtl_rel_classify(medtl_rel* m, const medtl_corpus* c, const medtl_settings* s, char** out);

/* Medication status table. With ner and rel both NULL the corpus's own
 * annotations are used; otherwise both models are required. `log` receives
 * one warning per line and may be NULL. */
MEDTL_API medtl_status medtl_extract(const medtl_corpus* c, medtl_ner* ner, medtl_rel* rel, const medtl_settings* s,
                                     size_t jobs, medtl_format format, char** table, char** log);

/* Token-level and span-level exact-match scores of two CoNLL texts. */
MEDTL_API medtl_status medtl_eval_conll(const char* gold, const char* pred, int include_padding, int json,
                                        char** report);

/* Runs one suite (NULL or "all" for every suite). Returns
 * MEDTL_ERR_VERIFICATION when a check fails; the report is set either way. */
MEDTL_API medtl_status medtl_verify(const char* suite, uint64_t seed, char** report);
/* Suite names, one per line. */
MEDTL_API medtl_status medtl_verify_suites(char** out);

#ifdef __cplusplus
}
#endif

#endif /* MEDTL_H */
