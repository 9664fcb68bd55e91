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

#include "harvest.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "error.hpp"
#include "synth.hpp"
#include "text.hpp"

namespace accbound {

namespace {

constexpr std::string_view kAnd = " AND ";
constexpr int kMaxRerolls = 10;

using PairKey = std::pair<std::string, std::string>;

PairKey key_of(std::string_view input, std::string_view output) {
  return {normalize_ws(input), normalize_ws(output)};
}

}  // namespace

HarvestMethod parse_method(std::string_view text) {
  if (text == "model") return HarvestMethod::kModel;
  if (text == "random") return HarvestMethod::kRandom;
  if (text == "comb") return HarvestMethod::kComb;
  fail(ErrorKind::kInvalidArgument, "method must be one of model, random, comb");
}

const char* to_string(HarvestMethod method) noexcept {
  switch (method) {
    case HarvestMethod::kModel: return "model";
    case HarvestMethod::kRandom: return "random";
    case HarvestMethod::kComb: return "comb";
  }
  return "comb";
}

void HarvestConfig::validate() const {
  if (!(ratio_neg_pos >= 0.0) || !std::isfinite(ratio_neg_pos)) {
    fail(ErrorKind::kInvalidArgument, "ratio_neg_pos must be a finite non-negative number");
  }
  if (!(insert_p >= 0.0 && insert_p <= 1.0) || !(delete_p >= 0.0 && delete_p <= 1.0)) {
    fail(ErrorKind::kInvalidArgument, "noise probabilities must lie in [0, 1]");
  }
  if (per_instance_neg_cap < 1) {
    fail(ErrorKind::kInvalidArgument, "per_instance_neg_cap must be at least 1");
  }
}

GoldMap make_gold_map(const std::vector<GoldPair>& pairs) {
  GoldMap map;
  for (const auto& [sentence, gold] : pairs) map.emplace(normalize_ws(sentence), gold);
  return map;
}

GoldMap make_gold_map(const std::vector<PredictionRecord>& records) {
  GoldMap map;
  for (const auto& rec : records) {
    if (!rec.gold) fail(ErrorKind::kValidation, "record '" + rec.id + "' has no gold");
    map.emplace(normalize_ws(rec.input), *rec.gold);
  }
  return map;
}

std::vector<TrainingPair> harvest_model_negatives(
    const std::vector<std::vector<PredictionRecord>>& dumps, const GoldMap& gold,
    const HarvestConfig& config) {
  config.validate();
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::string>> wrong;  // sentence -> outputs
  std::set<PairKey> seen;
  for (const auto& dump : dumps) {
    for (const auto& rec : dump) {
      const std::string sentence = normalize_ws(rec.input);
      const auto g = gold.find(sentence);
      if (g == gold.end()) {
        fail(ErrorKind::kValidation, "sentence absent from gold: '" + rec.input + "'");
      }
      auto [slot, inserted] = wrong.try_emplace(sentence);
      if (inserted) order.push_back(sentence);
      std::vector<std::string> candidates{rec.prediction};
      for (const auto& c : rec.beam) candidates.push_back(c.sequence);
      for (const auto& c : candidates) {
        const std::string out = normalize_ws(c);
        if (out.empty() || out == normalize_ws(g->second)) continue;
        if (seen.insert({sentence, out}).second) slot->second.push_back(out);
      }
    }
  }

  std::vector<TrainingPair> pairs;
  for (const auto& sentence : order) {
    const auto& outs = wrong.at(sentence);
    // Seeded per sentence so the sample does not depend on dump order.
    Rng rng(mix_seed(config.seed, fnv1a(sentence)));
    std::vector<std::size_t> picked = rng.sample_indices(outs.size(), config.per_instance_neg_cap);
    std::sort(picked.begin(), picked.end());
    for (std::size_t i : picked) {
      pairs.push_back({sentence, outs[i], Label::kIncorrect, PairSource::kCheckpointBeam});
    }
  }
  return pairs;
}

std::vector<TrainingPair> harvest_model_negatives(
    const std::vector<std::filesystem::path>& dump_paths, const GoldMap& gold,
    const HarvestConfig& config) {
  std::vector<std::vector<PredictionRecord>> dumps;
  dumps.reserve(dump_paths.size());
  for (const auto& p : dump_paths) dumps.push_back(read_records(p));
  return harvest_model_negatives(dumps, gold, config);
}

NoiseResult apply_conjunct_noise(std::string_view gold, double insert_p, double delete_p,
                                 const std::vector<std::string>& pool, Rng& rng) {
  NoiseResult result;
  std::vector<std::string> out;
  for (auto& conjunct : split_on(normalize_ws(gold), kAnd)) {
    const bool drop = rng.bernoulli(delete_p);
    const bool insert = rng.bernoulli(insert_p);
    const std::size_t choice = pool.empty() ? 0 : rng.below(pool.size());
    if (drop) {
      ++result.edits;
    } else {
      out.push_back(conjunct);
    }
    if (insert && !pool.empty()) {
      ++result.edits;
      out.push_back(pool[choice]);
    }
  }
  result.form = join(out, kAnd);
  return result;
}

std::vector<TrainingPair> harvest_random_negatives(const std::vector<GoldPair>& gold_pairs,
                                                   const HarvestConfig& config) {
  config.validate();
  std::vector<std::string> pool;
  {
    std::set<std::string> uniq;
    for (const auto& [sentence, gold] : gold_pairs) {
      if (!synth::well_formed(normalize_ws(gold))) {
        fail(ErrorKind::kStructure, "gold form is not conjunct-structured: '" + gold + "'");
      }
      for (auto& c : split_on(normalize_ws(gold), kAnd)) uniq.insert(std::move(c));
    }
    pool.assign(uniq.begin(), uniq.end());
  }

  Rng rng(mix_seed(config.seed, 0x6e6f697365ULL));
  std::vector<TrainingPair> pairs;
  std::set<PairKey> seen;
  for (const auto& [sentence, gold] : gold_pairs) {
    const std::string target = normalize_ws(gold);
    for (int attempt = 0; attempt < kMaxRerolls; ++attempt) {
      NoiseResult noised = apply_conjunct_noise(target, config.insert_p, config.delete_p, pool, rng);
      if (noised.form == target) continue;
      if (seen.insert(key_of(sentence, noised.form)).second) {
        pairs.push_back({normalize_ws(sentence), std::move(noised.form), Label::kIncorrect,
                         PairSource::kNoise});
      }
      break;
    }
  }
  return pairs;
}

TrainingSet assemble_training_set(const std::vector<GoldPair>& positives,
                                  const std::vector<TrainingPair>& negatives,
                                  const HarvestConfig& config) {
  config.validate();
  TrainingSet set;
  std::set<PairKey> seen;
  std::vector<TrainingPair> pos;
  for (const auto& [sentence, gold] : positives) {
    auto key = key_of(sentence, gold);
    if (!seen.insert(key).second) continue;
    pos.push_back({std::move(key.first), std::move(key.second), Label::kCorrect, PairSource::kGold});
  }

  std::vector<TrainingPair> neg;
  for (const auto& n : negatives) {
    if (n.label != Label::kIncorrect) {
      fail(ErrorKind::kValidation, "negatives must carry the incorrect label");
    }
    auto key = key_of(n.input, n.output);
    if (key.second.empty()) {
      ++set.dropped_empty;
      continue;
    }
    if (!seen.insert(key).second) {
      ++set.dropped_duplicate;
      continue;
    }
    neg.push_back({std::move(key.first), std::move(key.second), n.label, n.source});
  }

  Rng rng(mix_seed(config.seed, 0x617373656dULL));
  const auto target =
      static_cast<std::size_t>(std::floor(config.ratio_neg_pos * static_cast<double>(pos.size())));
  set.pairs = std::move(pos);
  if (neg.size() <= target) {
    set.scarcity = target - neg.size();
    for (auto& n : neg) set.pairs.push_back(std::move(n));
  } else {
    std::vector<std::size_t> picked = rng.sample_indices(neg.size(), target);
    std::sort(picked.begin(), picked.end());
    for (std::size_t i : picked) set.pairs.push_back(std::move(neg[i]));
  }
  rng.shuffle(set.pairs);
  return set;
}

}  // namespace accbound
