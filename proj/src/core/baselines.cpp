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

#include "baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"

namespace accbound {

namespace {

void require_nonempty(const ConfidenceSet& conf) {
  if (conf.empty()) fail(ErrorKind::kInvalidArgument, "confidence set is empty");
}

const std::vector<bool>& require_gold(const ConfidenceSet& conf) {
  if (!conf.gold_correct) fail(ErrorKind::kInvalidArgument, "confidence set has no gold labels");
  return *conf.gold_correct;
}

}  // namespace

ConfidenceSet ConfidenceSet::from_records(const std::vector<PredictionRecord>& records) {
  ConfidenceSet set;
  bool all_gold = !records.empty();
  for (const auto& r : records) all_gold = all_gold && r.gold.has_value();
  if (all_gold) set.gold_correct.emplace();
  for (const auto& r : records) {
    const auto c = r.confidence();
    if (!c) fail(ErrorKind::kUndefined, "missing confidence: record '" + r.id + "' has an empty beam");
    set.ids.push_back(r.id);
    set.confidences.push_back(*c);
    if (all_gold) set.gold_correct->push_back(r.is_correct());
  }
  return set;
}

void ConfidenceSet::validate() const {
  if (ids.size() != confidences.size() ||
      (gold_correct && gold_correct->size() != confidences.size())) {
    fail(ErrorKind::kValidation, "confidence set fields are not aligned");
  }
  for (double c : confidences) {
    if (!(c > 0.0 && c <= 1.0)) fail(ErrorKind::kValidation, "confidences must lie in (0, 1]");
  }
}

double ConfidenceSet::gold_accuracy() const {
  require_nonempty(*this);
  const auto& g = require_gold(*this);
  return static_cast<double>(std::count(g.begin(), g.end(), true)) / static_cast<double>(g.size());
}

double maxprob_estimate(const ConfidenceSet& conf, double gamma) {
  require_nonempty(conf);
  const auto above = std::count_if(conf.confidences.begin(), conf.confidences.end(),
                                   [gamma](double c) { return c > gamma; });
  return static_cast<double>(above) / static_cast<double>(conf.confidences.size());
}

double avg_confidence(const ConfidenceSet& conf) {
  require_nonempty(conf);
  return std::accumulate(conf.confidences.begin(), conf.confidences.end(), 0.0) /
         static_cast<double>(conf.confidences.size());
}

double doc_estimate(double acc_dev, double conf_dev_mean, double conf_test_mean) {
  return std::clamp(acc_dev - (conf_dev_mean - conf_test_mean), 0.0, 1.0);
}

double atc_fit(const ConfidenceSet& calib) {
  require_nonempty(calib);
  const auto& gold = require_gold(calib);
  const auto errors = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), false));
  std::vector<double> sorted = calib.confidences;
  std::sort(sorted.begin(), sorted.end());
  if (errors >= sorted.size()) {
    return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
  }
  return sorted[errors];
}

double atc_estimate(const ConfidenceSet& test, double gamma) {
  require_nonempty(test);
  const auto at_or_above = std::count_if(test.confidences.begin(), test.confidences.end(),
                                         [gamma](double c) { return c >= gamma; });
  return static_cast<double>(at_or_above) / static_cast<double>(test.confidences.size());
}

OracleBounds maxprob_oracle_bounds(const ConfidenceSet& test, double target_cr, double target_ir) {
  require_nonempty(test);
  const auto& gold = require_gold(test);
  const auto n_correct = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), true));
  const std::size_t n_incorrect = gold.size() - n_correct;
  if (n_correct == 0) fail(ErrorKind::kUndefined, "correct-recall undefined: no correct instances");
  if (n_incorrect == 0) {
    fail(ErrorKind::kUndefined, "incorrect-recall undefined: no incorrect instances");
  }

  std::vector<double> thresholds{0.0};
  thresholds.insert(thresholds.end(), test.confidences.begin(), test.confidences.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  double best_cr_gap = std::numeric_limits<double>::infinity();
  double best_ir_gap = std::numeric_limits<double>::infinity();
  OracleBounds out;
  for (double gamma : thresholds) {
    std::size_t tc = 0;
    std::size_t ti = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool predicted_correct = test.confidences[i] > gamma;
      if (gold[i] && predicted_correct) ++tc;
      if (!gold[i] && !predicted_correct) ++ti;
    }
    const double cr = static_cast<double>(tc) / static_cast<double>(n_correct);
    const double ir = static_cast<double>(ti) / static_cast<double>(n_incorrect);
    if (std::abs(cr - target_cr) < best_cr_gap) {
      best_cr_gap = std::abs(cr - target_cr);
      out.gamma_upper = gamma;
    }
    if (std::abs(ir - target_ir) < best_ir_gap) {
      best_ir_gap = std::abs(ir - target_ir);
      out.gamma_lower = gamma;
    }
  }
  out.upper = maxprob_estimate(test, out.gamma_upper);
  out.lower = maxprob_estimate(test, out.gamma_lower);
  return out;
}

}  // namespace accbound
