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

#include "estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "error.hpp"
#include "rng.hpp"

namespace accbound {

VerdictMatrix::VerdictMatrix(std::vector<std::string> instance_ids,
                             std::vector<std::vector<Verdict>> rows)
    : ids_(std::move(instance_ids)), members_(rows.size()) {
  if (rows.empty()) fail(ErrorKind::kValidation, "verdict matrix needs at least one member");
  if (ids_.empty()) fail(ErrorKind::kValidation, "verdict matrix needs at least one instance");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) {
      fail(ErrorKind::kValidation, "duplicate instance id '" + id + "'");
    }
  }
  cells_.reserve(members_ * ids_.size());
  for (std::size_t m = 0; m < rows.size(); ++m) {
    if (rows[m].size() != ids_.size()) {
      fail(ErrorKind::kValidation, "member " + std::to_string(m) + " has " +
                                       std::to_string(rows[m].size()) + " verdicts, expected " +
                                       std::to_string(ids_.size()));
    }
    cells_.insert(cells_.end(), rows[m].begin(), rows[m].end());
  }
}

std::span<const Verdict> VerdictMatrix::row(std::size_t member) const {
  return std::span<const Verdict>(cells_).subspan(member * ids_.size(), ids_.size());
}

std::vector<Verdict> VerdictMatrix::column(std::size_t instance) const {
  std::vector<Verdict> col;
  col.reserve(members_);
  for (std::size_t m = 0; m < members_; ++m) col.push_back(cells_[m * ids_.size() + instance]);
  return col;
}

std::vector<std::vector<Verdict>> VerdictMatrix::rows() const {
  std::vector<std::vector<Verdict>> out;
  for (std::size_t m = 0; m < members_; ++m) {
    const auto r = row(m);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

VerdictMatrix VerdictMatrix::select(std::span<const std::size_t> columns) const {
  std::vector<std::string> ids;
  ids.reserve(columns.size());
  for (std::size_t c : columns) ids.push_back(ids_.at(c));
  std::vector<std::vector<Verdict>> rows(members_);
  for (std::size_t m = 0; m < members_; ++m) {
    rows[m].reserve(columns.size());
    for (std::size_t c : columns) rows[m].push_back(cells_[m * ids_.size() + c]);
  }
  return VerdictMatrix(std::move(ids), std::move(rows));
}

Label ensemble_correct(std::span<const Verdict> column) {
  if (column.empty()) fail(ErrorKind::kInvalidArgument, "empty verdict column");
  const bool any = std::any_of(column.begin(), column.end(), [](const Verdict& v) { return v.correct(); });
  return any ? Label::kCorrect : Label::kIncorrect;
}

Label ensemble_incorrect(std::span<const Verdict> column) {
  if (column.empty()) fail(ErrorKind::kInvalidArgument, "empty verdict column");
  const bool any = std::any_of(column.begin(), column.end(), [](const Verdict& v) { return !v.correct(); });
  return any ? Label::kIncorrect : Label::kCorrect;
}

double predicted_accuracy(std::span<const Label> labels) {
  if (labels.empty()) fail(ErrorKind::kInvalidArgument, "no labels to score");
  const auto n_correct = std::count(labels.begin(), labels.end(), Label::kCorrect);
  return static_cast<double>(n_correct) / static_cast<double>(labels.size());
}

std::vector<Label> member_labels(const VerdictMatrix& m, std::size_t member) {
  std::vector<Label> out;
  for (const auto& v : m.row(member)) out.push_back(v.label());
  return out;
}

std::vector<Label> ensemble_correct_labels(const VerdictMatrix& m) {
  std::vector<Label> out;
  out.reserve(m.instances());
  for (std::size_t i = 0; i < m.instances(); ++i) out.push_back(ensemble_correct(m.column(i)));
  return out;
}

std::vector<Label> ensemble_incorrect_labels(const VerdictMatrix& m) {
  std::vector<Label> out;
  out.reserve(m.instances());
  for (std::size_t i = 0; i < m.instances(); ++i) out.push_back(ensemble_incorrect(m.column(i)));
  return out;
}

BoundsReport bounds(const VerdictMatrix& matrix) {
  BoundsReport r;
  r.n_instances = matrix.instances();
  r.upper = predicted_accuracy(ensemble_correct_labels(matrix));
  r.lower = predicted_accuracy(ensemble_incorrect_labels(matrix));
  for (std::size_t m = 0; m < matrix.members(); ++m) {
    r.per_member_acc.push_back(predicted_accuracy(member_labels(matrix, m)));
  }
  r.mean_discrim = std::accumulate(r.per_member_acc.begin(), r.per_member_acc.end(), 0.0) /
                   static_cast<double>(r.per_member_acc.size());
  r.mean_bounds = (r.lower + r.upper) / 2.0;
  return r;
}

std::size_t order_statistic_index(std::size_t n, double q) {
  if (n == 0) fail(ErrorKind::kInvalidArgument, "order statistic of an empty sample");
  // The epsilon keeps e.g. 0.975 * 1000 from rounding up to rank 976.
  const double rank = std::ceil(q * static_cast<double>(n) - 1e-9);
  const auto r = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(n)));
  return r - 1;
}

namespace {

Interval percentile_interval(std::vector<double> values, double alpha) {
  std::sort(values.begin(), values.end());
  return {values[order_statistic_index(values.size(), alpha / 2.0)],
          values[order_statistic_index(values.size(), 1.0 - alpha / 2.0)]};
}

}  // namespace

Interval bootstrap_ci(std::span<const double> member_probs, std::size_t n_samples, double alpha,
                      std::uint64_t seed) {
  if (member_probs.empty()) fail(ErrorKind::kInvalidArgument, "bootstrap needs probabilities");
  if (n_samples == 0) fail(ErrorKind::kInvalidArgument, "bootstrap needs at least one sample");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::kInvalidArgument, "alpha must lie in (0, 1)");
  for (double p : member_probs) {
    if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::kInvalidArgument, "probabilities must lie in [0, 1]");
  }
  std::vector<double> accs(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) {
    Rng rng(mix_seed(seed, r));
    std::size_t correct = 0;
    for (double p : member_probs) correct += rng.bernoulli(p) ? 1 : 0;
    accs[r] = static_cast<double>(correct) / static_cast<double>(member_probs.size());
  }
  return percentile_interval(std::move(accs), alpha);
}

void attach_bootstrap(BoundsReport& report, const VerdictMatrix& matrix, std::size_t n_samples,
                      double alpha, std::uint64_t seed) {
  report.ci.assign(matrix.members(), std::nullopt);
  for (std::size_t m = 0; m < matrix.members(); ++m) {
    std::vector<double> probs;
    for (const auto& v : matrix.row(m)) probs.push_back(v.probability());
    report.ci[m] = bootstrap_ci(probs, n_samples, alpha, mix_seed(seed, m));
  }
}

std::vector<SubsetRow> subset_robustness(const VerdictMatrix& matrix,
                                         std::span<const Label> gold_labels,
                                         std::span<const std::size_t> subset_sizes,
                                         std::size_t n_resamples, std::uint64_t seed) {
  const std::size_t n = matrix.instances();
  if (gold_labels.size() != n) {
    fail(ErrorKind::kInvalidArgument, "gold labels must cover every instance");
  }
  if (n_resamples == 0) fail(ErrorKind::kInvalidArgument, "n_resamples must be positive");
  std::vector<SubsetRow> table;
  for (std::size_t size : subset_sizes) {
    if (size == 0 || size > n) {
      fail(ErrorKind::kInvalidArgument, "subset size " + std::to_string(size) +
                                            " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<double> gold_acc, lower, upper;
    for (std::size_t r = 0; r < n_resamples; ++r) {
      Rng rng(mix_seed(mix_seed(seed, size), r));
      std::vector<std::size_t> cols = rng.sample_indices(n, size);
      std::sort(cols.begin(), cols.end());
      std::vector<Label> g;
      g.reserve(size);
      for (std::size_t c : cols) g.push_back(gold_labels[c]);
      const BoundsReport b = bounds(matrix.select(cols));
      gold_acc.push_back(predicted_accuracy(g));
      lower.push_back(b.lower);
      upper.push_back(b.upper);
    }
    table.push_back({size, percentile_interval(std::move(gold_acc), 0.05),
                     percentile_interval(std::move(lower), 0.05),
                     percentile_interval(std::move(upper), 0.05)});
  }
  return table;
}

}  // namespace accbound
