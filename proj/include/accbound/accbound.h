// Copyright 2026 The accbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ACCBOUND_ACCBOUND_H_
#define ACCBOUND_ACCBOUND_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(ACCBOUND_BUILDING)
#define ACCB_API __declspec(dllexport)
#else
#define ACCB_API __declspec(dllimport)
#endif
#else
#define ACCB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; on failure the message is
   available from accb_last_error() on the calling thread. */
typedef enum accb_status {
  ACCB_OK = 0,
  ACCB_ERR_INVALID_ARGUMENT = 1,
  ACCB_ERR_PARSE = 2,
  ACCB_ERR_VALIDATION = 3,
  ACCB_ERR_IO = 4,
  ACCB_ERR_GENERATION = 5,
  ACCB_ERR_STRUCTURE = 6,
  ACCB_ERR_TRAINING = 7,
  ACCB_ERR_UNDEFINED = 8,
  ACCB_ERR_INTERNAL = 9
} accb_status;

typedef enum accb_harvest_method {
  ACCB_HARVEST_MODEL = 0,
  ACCB_HARVEST_RANDOM = 1,
  ACCB_HARVEST_COMB = 2
} accb_harvest_method;

typedef struct accb_records accb_records;
typedef struct accb_ensemble accb_ensemble;
typedef struct accb_verdicts accb_verdicts;
typedef struct accb_report accb_report;

ACCB_API const char* accb_version(void);
ACCB_API const char* accb_status_name(accb_status status);
ACCB_API const char* accb_last_error(void);
ACCB_API void accb_string_free(char* s);

/* ---- Prediction records (line-delimited json) ---- */

ACCB_API accb_status accb_records_read(const char* path, accb_records** out);
ACCB_API accb_status accb_records_write(const accb_records* records, const char* path);
ACCB_API size_t accb_records_size(const accb_records* records);
/* 1 when every record carries a gold sequence. */
ACCB_API int accb_records_have_gold(const accb_records* records);
/* Copies gold sequences from `gold` onto records with the same id. Every
   record must find a match. */
ACCB_API accb_status accb_records_attach_gold(accb_records* records, const accb_records* gold);
ACCB_API void accb_records_free(accb_records* records);

/* ---- Synthetic task ---- */

typedef struct accb_synth_options {
  uint64_t seed;
  size_t n_train;
  size_t n_test; /* per test split */
  size_t n_dev;  /* 0: same as n_test */
  size_t grammar_depth;
  size_t vocab_size;
  size_t beam;
  double parser_error_id;
  double parser_error_ood;
} accb_synth_options;

ACCB_API void accb_synth_options_default(accb_synth_options* options);
/* Writes train, dev, test_id, test_ood and ckpt_<i> record files. */
ACCB_API accb_status accb_synth_run(const accb_synth_options* options, const char* out_dir);

/* ---- Training-pair harvesting ---- */

typedef struct accb_harvest_options {
  uint64_t seed;
  double ratio; /* negatives per positive */
  accb_harvest_method method;
  double insert_p;
  double delete_p;
  size_t per_instance_neg_cap;
} accb_harvest_options;

typedef struct accb_harvest_stats {
  size_t pairs;
  size_t positives;
  size_t negatives;
  size_t scarcity;
  size_t dropped_empty;
  size_t dropped_duplicate;
} accb_harvest_stats;

ACCB_API void accb_harvest_options_default(accb_harvest_options* options);
ACCB_API accb_status accb_harvest_method_parse(const char* text, accb_harvest_method* out);
/* `gold_path` holds records with gold; positives are their (input, gold)
   pairs. Dumps are only read for the model and comb methods. */
ACCB_API accb_status accb_harvest_run(const accb_harvest_options* options, const char* gold_path,
                                      const char* const* dump_paths, size_t n_dumps,
                                      const char* out_path, accb_harvest_stats* stats);

/* ---- Discriminator ensemble ---- */

typedef struct accb_train_options {
  uint64_t seed; /* member i uses seed + i */
  size_t members;
  size_t n_features;
  size_t epochs;
  double learning_rate;
  double bias_learning_rate;
  double l2;
  int overlap;
} accb_train_options;

ACCB_API void accb_train_options_default(accb_train_options* options);
ACCB_API accb_status accb_ensemble_train(const char* pairs_path, const accb_train_options* options,
                                         accb_ensemble** out);
ACCB_API accb_status accb_ensemble_save(const accb_ensemble* ensemble, const char* path);
ACCB_API accb_status accb_ensemble_load(const char* path, accb_ensemble** out);
ACCB_API size_t accb_ensemble_members(const accb_ensemble* ensemble);
/* Probability that member judges (input, output) Correct. */
ACCB_API accb_status accb_ensemble_score(const accb_ensemble* ensemble, size_t member,
                                         const char* input, const char* output,
                                         double* probability);
ACCB_API void accb_ensemble_free(accb_ensemble* ensemble);

/* ---- Verdict matrices ---- */

ACCB_API accb_status accb_verdicts_predict(const accb_ensemble* ensemble,
                                           const accb_records* records, accb_verdicts** out);
/* External verdicts file aligned to `records`. */
ACCB_API accb_status accb_verdicts_read(const char* path, const accb_records* records,
                                        accb_verdicts** out);
ACCB_API accb_status accb_verdicts_write(const accb_verdicts* verdicts, const char* path);
/* probabilities is row-major, n_members rows of n_instances. */
ACCB_API accb_status accb_verdicts_create(const char* const* ids, size_t n_instances,
                                          size_t n_members, const double* probabilities,
                                          accb_verdicts** out);
ACCB_API size_t accb_verdicts_members(const accb_verdicts* verdicts);
ACCB_API size_t accb_verdicts_instances(const accb_verdicts* verdicts);
ACCB_API accb_status accb_verdicts_bounds(const accb_verdicts* verdicts, double* lower,
                                          double* upper);
ACCB_API void accb_verdicts_free(accb_verdicts* verdicts);

/* ---- Estimation and reports ---- */

typedef struct accb_estimate_options {
  uint64_t seed;
  size_t bootstrap_samples; /* 0 disables per-member intervals */
  double alpha;
  const size_t* subset_sizes; /* sizes larger than the split are skipped */
  size_t n_subset_sizes;
  size_t resamples;
} accb_estimate_options;

ACCB_API void accb_estimate_options_default(accb_estimate_options* options);
/* Starts an empty report; splits are appended with accb_report_add_split. */
ACCB_API accb_status accb_report_create(accb_report** out);
ACCB_API accb_status accb_report_add_split(accb_report* report, const char* name,
                                           const accb_verdicts* verdicts,
                                           const accb_records* records,
                                           const accb_estimate_options* options);
/* Confidence baselines for the most recently added split. dev and calib may
   be NULL. */
ACCB_API accb_status accb_report_add_baselines(accb_report* report, const accb_records* test,
                                               const accb_records* dev,
                                               const accb_records* calib, double gamma);
ACCB_API size_t accb_report_splits(const accb_report* report);

typedef struct accb_split_summary {
  size_t n_instances;
  double lower;
  double upper;
  double mean_discrim;
  double mean_bounds;
  int has_gold;
  double gold;
} accb_split_summary;

ACCB_API accb_status accb_report_summary(const accb_report* report, size_t split,
                                         accb_split_summary* out);
/* Recall figures for one verdict source: member index, or -1 for the upper
   bound labels and -2 for the lower bound labels. Undefined ratios are NaN. */
ACCB_API accb_status accb_report_recall(const accb_report* report, size_t split, int source,
                                        double* correct_recall, double* incorrect_recall);
/* Caller frees the returned strings with accb_string_free. */
ACCB_API accb_status accb_report_json(const accb_report* report, char** out);
ACCB_API accb_status accb_report_table(const accb_report* report, char** out);
ACCB_API accb_status accb_report_save(const accb_report* report, const char* out_dir);
ACCB_API void accb_report_free(accb_report* report);

/* ---- Confidence baselines alone ---- */

ACCB_API accb_status accb_baselines_json(const accb_records* test, const accb_records* dev,
                                         const accb_records* calib, double gamma, char** out);

/* ---- Full pipeline on the synthetic task ---- */

typedef struct accb_e2e_options {
  uint64_t seed;
  accb_synth_options synth;
  accb_harvest_options harvest;
  accb_train_options train;
  accb_estimate_options estimate;
  double gamma;
} accb_e2e_options;

/* Defaults for every stage; per-stage seeds are derived from `seed` by
   accb_e2e_run, so seed fields inside the nested options are ignored. */
ACCB_API void accb_e2e_options_default(accb_e2e_options* options);
/* Runs synth, harvest, train and estimate; writes artifacts plus report.json
   and report.txt under out_dir when it is non-NULL. */
ACCB_API accb_status accb_e2e_run(const accb_e2e_options* options, const char* out_dir,
                                  accb_report** out);

#ifdef __cplusplus
}
#endif

#endif  // ACCBOUND_ACCBOUND_H_
