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

#include <optional>
#include <string>
#include <vector>

#include "records.hpp"

// Confidence-based accuracy estimators. Confidence is the probability of the
// top beam item.
namespace accbound {

struct ConfidenceSet {
  std::vector<std::string> ids;
  std::vector<double> confidences;           // (0, 1]
  std::optional<std::vector<bool>> gold_correct;

  // Throws kUndefined for a record with an empty beam (missing confidence).
  static ConfidenceSet from_records(const std::vector<PredictionRecord>& records);

  void validate() const;
  bool empty() const noexcept { return confidences.empty(); }
  double gold_accuracy() const;
};

// Fraction of instances with confidence strictly above gamma.
double maxprob_estimate(const ConfidenceSet& conf, double gamma = 0.5);

double avg_confidence(const ConfidenceSet& conf);

// acc_dev - (conf_dev_mean - conf_test_mean), clamped to [0, 1].
double doc_estimate(double acc_dev, double conf_dev_mean, double conf_test_mean);

// Threshold whose below-count matches the calibration error count: the
// (errors)-th order statistic of the sorted confidences, 0-based, or just
// above the maximum when every instance is an error. Ties resolve toward the
// smaller threshold.
double atc_fit(const ConfidenceSet& calib);

// Fraction of instances with confidence >= gamma.
double atc_estimate(const ConfidenceSet& test, double gamma);

struct OracleBounds {
  double upper = 0.0;
  double lower = 0.0;
  double gamma_upper = 0.0;
  double gamma_lower = 0.0;
};

// Maxprob thresholds matched against the discriminator bounds' recalls: the
// upper threshold reproduces target_cr, the lower one target_ir, each
// minimizing |recall - target| over observed thresholds (ties to the smaller
// threshold).
OracleBounds maxprob_oracle_bounds(const ConfidenceSet& test, double target_cr, double target_ir);

}  // namespace accbound
