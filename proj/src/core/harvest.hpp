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
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "records.hpp"
#include "rng.hpp"

namespace accbound {

enum class HarvestMethod : std::uint8_t {
  kModel,   // incorrect beam items from parser checkpoints
  kRandom,  // conjunct insert/delete noise applied to gold forms
  kComb,    // union of both
};

HarvestMethod parse_method(std::string_view text);
const char* to_string(HarvestMethod method) noexcept;

struct HarvestConfig {
  double ratio_neg_pos = 3.0;
  HarvestMethod method = HarvestMethod::kComb;
  double insert_p = 0.2;
  double delete_p = 0.2;
  std::size_t per_instance_neg_cap = 4;
  std::uint64_t seed = 0;

  void set_noise_p(double p) { insert_p = delete_p = p; }
  void validate() const;
};

// Gold sequences keyed by whitespace-normalized sentence.
using GoldMap = std::unordered_map<std::string, std::string>;
using GoldPair = std::pair<std::string, std::string>;  // (sentence, gold)

GoldMap make_gold_map(const std::vector<GoldPair>& pairs);
GoldMap make_gold_map(const std::vector<PredictionRecord>& records);

// Incorrect beam items pooled per sentence across all dumps, deduplicated,
// then capped at per_instance_neg_cap by uniform sampling. Sentences appear in
// order of first occurrence.
std::vector<TrainingPair> harvest_model_negatives(
    const std::vector<std::vector<PredictionRecord>>& dumps, const GoldMap& gold,
    const HarvestConfig& config);

std::vector<TrainingPair> harvest_model_negatives(
    const std::vector<std::filesystem::path>& dump_paths, const GoldMap& gold,
    const HarvestConfig& config);

struct NoiseResult {
  std::string form;
  std::size_t edits = 0;  // deletions + insertions
};

// One noising pass over a conjunct-structured form: each conjunct is deleted
// with probability delete_p, and a random conjunct from `pool` is inserted
// after it with probability insert_p.
NoiseResult apply_conjunct_noise(std::string_view gold, double insert_p, double delete_p,
                                 const std::vector<std::string>& pool, Rng& rng);

// Noise-based negatives. A pass that reproduces the gold form is re-rolled up
// to 10 times, after which the instance is skipped.
std::vector<TrainingPair> harvest_random_negatives(const std::vector<GoldPair>& gold_pairs,
                                                   const HarvestConfig& config);

struct TrainingSet {
  std::vector<TrainingPair> pairs;
  std::size_t scarcity = 0;        // negatives short of ratio * |positives|
  std::size_t dropped_empty = 0;   // negatives with an empty output
  std::size_t dropped_duplicate = 0;
};

// All positives plus min(|negatives|, floor(ratio * |positives|)) negatives,
// shuffled under config.seed.
TrainingSet assemble_training_set(const std::vector<GoldPair>& positives,
                                  const std::vector<TrainingPair>& negatives,
                                  const HarvestConfig& config);

}  // namespace accbound
