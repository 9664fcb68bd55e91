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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "baselines.hpp"
#include "discriminator.hpp"
#include "estimator.hpp"
#include "harvest.hpp"
#include "metrics.hpp"
#include "records.hpp"
#include "synth.hpp"

namespace accbound {

struct EvaluationOptions {
  std::size_t bootstrap_samples = 1000;
  double alpha = 0.05;
  double gamma = 0.5;
  std::vector<std::size_t> subset_sizes;  // empty: no subset table; sizes above n are skipped
  std::size_t resamples = 50;
  std::uint64_t seed = 0;
};

// DOC uses the labeled `dev` set, ATC is fitted on `calib`; the oracle
// matches the recalls in `recall` and needs gold on `test`.
struct BaselineEstimates {
  double gamma = 0.5;
  double maxprob = 0.0;
  double avg_confidence = 0.0;
  std::optional<double> doc;         // needs a labeled dev set
  std::optional<double> atc;         // needs a labeled calibration set
  std::optional<double> atc_gamma;
  std::optional<OracleBounds> oracle;  // needs gold on the evaluated split
};

struct RecallSummary {
  std::vector<Confusion> members;
  Confusion upper;  // ensemble_correct labels
  Confusion lower;  // ensemble_incorrect labels
};

struct SplitReport {
  std::string name;
  BoundsReport bounds;
  std::optional<double> gold;  // present when every record has gold
  std::optional<RecallSummary> recall;
  std::optional<BaselineEstimates> baselines;
  std::vector<SubsetRow> subsets;
};

std::vector<Label> gold_labels(const std::vector<PredictionRecord>& records);

// Bounds, per-member bootstrap CIs, and (with gold) recall metrics and the
// subset-robustness table for one split.
SplitReport evaluate_split(std::string name, const VerdictMatrix& matrix,
                           const std::vector<PredictionRecord>& records,
                           const EvaluationOptions& options);

BaselineEstimates estimate_baselines(const std::vector<PredictionRecord>& test,
                                     const std::vector<PredictionRecord>* dev,
                                     const std::vector<PredictionRecord>* calib,
                                     const std::optional<RecallSummary>& recall, double gamma);

nlohmann::ordered_json to_json(const SplitReport& report);
nlohmann::ordered_json to_json(const std::vector<SplitReport>& reports);

// Plain-text table with one Acc/AE column pair per split; AE columns appear
// only for splits with gold. Values are percentages with one decimal.
std::string render_table(const std::vector<SplitReport>& reports);
std::string render_recall_table(const std::vector<SplitReport>& reports);
std::string render_subset_table(const SplitReport& report);
// Estimate table, recall table, and subset tables of every split.
std::string render_report(const std::vector<SplitReport>& reports);

// report.json and report.txt under out_dir; `extra` keys are appended to the
// json object.
void write_report(const std::vector<SplitReport>& reports, const std::filesystem::path& out_dir,
                  const nlohmann::ordered_json& extra = nlohmann::ordered_json::object());

struct SynthConfig {
  synth::TaskConfig task;
  std::size_t beam = 4;
  std::vector<double> checkpoint_rates = {0.5, 0.4, 0.3, 0.2, 0.1};
  double parser_error_id = 0.04;   // final parser, per-step, in distribution
  double parser_error_ood = 0.12;  // final parser, per-step, on held-out combinations
  std::uint64_t seed = 7;
};

struct SynthOutput {
  synth::Task task;
  std::vector<std::vector<PredictionRecord>> checkpoint_dumps;  // over train
  std::vector<PredictionRecord> train;
  std::vector<PredictionRecord> dev;
  std::vector<PredictionRecord> test_id;
  std::vector<PredictionRecord> test_ood;
};

SynthOutput synthesize(const SynthConfig& config);

// Writes train/dev/test_id/test_ood.jsonl and ckpt_<i>.jsonl under out_dir.
void write_synth(const SynthOutput& out, const std::filesystem::path& out_dir);

// Negatives by config.method (model: checkpoint dumps, random: conjunct
// noise, comb: both), assembled with the positives into a training set.
TrainingSet build_training_set(const std::vector<GoldPair>& gold_pairs,
                               const std::vector<std::vector<PredictionRecord>>& dumps,
                               const HarvestConfig& config);

struct E2EConfig {
  SynthConfig synth;
  HarvestConfig harvest;
  DiscriminatorSpec discriminator;
  std::size_t members = 5;
  EvaluationOptions evaluation;
  std::uint64_t seed = 7;

  // Derives every component seed from `seed`.
  void apply_seed(std::uint64_t seed);
};

struct E2EResult {
  std::vector<SplitReport> splits;  // test_id, test_ood
  TrainingSet training;
  std::string table;
};

// Full pipeline on the synthetic task. When out_dir is non-empty, every
// artifact plus report.json and report.txt is written beneath it.
E2EResult run_e2e(const E2EConfig& config, const std::filesystem::path& out_dir = {});

}  // namespace accbound
