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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "records.hpp"

namespace accbound {

// members x instances grid of verdicts. Rectangular by construction; missing
// verdicts are not representable.
class VerdictMatrix {
 public:
  VerdictMatrix(std::vector<std::string> instance_ids, std::vector<std::vector<Verdict>> rows);

  std::size_t members() const noexcept { return members_; }
  std::size_t instances() const noexcept { return ids_.size(); }
  const std::vector<std::string>& instance_ids() const noexcept { return ids_; }

  std::span<const Verdict> row(std::size_t member) const;
  std::vector<Verdict> column(std::size_t instance) const;
  std::vector<std::vector<Verdict>> rows() const;

  // Restriction to the given instance columns, in the given order.
  VerdictMatrix select(std::span<const std::size_t> columns) const;

 private:
  std::vector<std::string> ids_;
  std::size_t members_ = 0;
  std::vector<Verdict> cells_;  // row-major
};

// Correct if any member says Correct.
Label ensemble_correct(std::span<const Verdict> column);
// Incorrect if any member says Incorrect.
Label ensemble_incorrect(std::span<const Verdict> column);

// |{Correct}| / |labels|.
double predicted_accuracy(std::span<const Label> labels);

std::vector<Label> member_labels(const VerdictMatrix& m, std::size_t member);
std::vector<Label> ensemble_correct_labels(const VerdictMatrix& m);
std::vector<Label> ensemble_incorrect_labels(const VerdictMatrix& m);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct BoundsReport {
  double lower = 0.0;   // ensemble_incorrect accuracy
  double upper = 0.0;   // ensemble_correct accuracy
  std::vector<double> per_member_acc;
  double mean_discrim = 0.0;
  double mean_bounds = 0.0;
  std::size_t n_instances = 0;
  std::vector<std::optional<Interval>> ci;  // per member, when bootstrapped
};

BoundsReport bounds(const VerdictMatrix& matrix);

// 1-based rank ceil(q * n), clamped to [1, n], returned 0-based.
std::size_t order_statistic_index(std::size_t n, double q);

// Percentile interval of the accuracy of n_samples Bernoulli draws where
// instance i is correct with probability member_probs[i]. For n_samples =
// 1000 and alpha = 0.05 these are the 25th and 975th sorted accuracies.
// Resample r is drawn from a generator seeded with mix_seed(seed, r).
Interval bootstrap_ci(std::span<const double> member_probs, std::size_t n_samples = 1000,
                      double alpha = 0.05, std::uint64_t seed = 0);

// Fills report.ci with one interval per member.
void attach_bootstrap(BoundsReport& report, const VerdictMatrix& matrix,
                      std::size_t n_samples = 1000, double alpha = 0.05, std::uint64_t seed = 0);

struct SubsetRow {
  std::size_t size = 0;
  Interval gold;
  Interval lower;
  Interval upper;
};

// For every size, n_resamples subsets drawn without replacement; each row
// holds the 2.5 / 97.5 percentile intervals of gold accuracy and both bounds.
std::vector<SubsetRow> subset_robustness(const VerdictMatrix& matrix,
                                         std::span<const Label> gold_labels,
                                         std::span<const std::size_t> subset_sizes,
                                         std::size_t n_resamples = 50, std::uint64_t seed = 0);

}  // namespace accbound
