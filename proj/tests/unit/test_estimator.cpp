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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "estimator.hpp"
#include "rng.hpp"

using namespace accbound;

namespace {

constexpr Label C = Label::kCorrect;
constexpr Label I = Label::kIncorrect;

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("i" + std::to_string(i));
  return out;
}

VerdictMatrix from_labels(const std::vector<std::vector<Label>>& rows) {
  std::vector<std::vector<Verdict>> v;
  for (const auto& row : rows) {
    std::vector<Verdict> r;
    for (Label l : row) r.push_back(Verdict::of(l));
    v.push_back(std::move(r));
  }
  return VerdictMatrix(ids(rows.front().size()), std::move(v));
}

VerdictMatrix random_matrix(Rng& rng, std::size_t members, std::size_t n) {
  std::vector<std::vector<Verdict>> rows(members);
  for (auto& row : rows) {
    const double bias = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) row.emplace_back(rng.uniform() < bias ? rng.uniform() : 0.0);
  }
  return VerdictMatrix(ids(n), std::move(rows));
}

}  // namespace

TEST_CASE("matrix construction") {
  CHECK_THROWS_AS(VerdictMatrix({}, {}), Error);
  CHECK_THROWS_AS(VerdictMatrix(ids(2), {{Verdict(1.0)}}), Error);
  CHECK_THROWS_AS(VerdictMatrix({"a", "a"}, {{Verdict(1.0), Verdict(0.0)}}), Error);
  const VerdictMatrix m = from_labels({{C, I, C}, {I, I, C}});
  CHECK(m.members() == 2);
  CHECK(m.instances() == 3);
  CHECK(m.column(0) == std::vector<Verdict>{Verdict(1.0), Verdict(0.0)});
  const std::vector<std::size_t> cols{2, 0};
  const VerdictMatrix s = m.select(cols);
  CHECK(s.instance_ids() == std::vector<std::string>{"i2", "i0"});
  CHECK(member_labels(s, 1) == std::vector<Label>{C, I});
}

TEST_CASE("voting rules") {
  auto col = [](std::vector<Label> ls) {
    std::vector<Verdict> v;
    for (Label l : ls) v.push_back(Verdict::of(l));
    return v;
  };
  CHECK(ensemble_correct(col({I, I, C})) == C);
  CHECK(ensemble_correct(col({I, I})) == I);
  CHECK(ensemble_correct(col({C})) == C);
  CHECK(ensemble_incorrect(col({C, I})) == I);
  CHECK(ensemble_incorrect(col({C, C})) == C);
  CHECK_THROWS_AS(ensemble_correct({}), Error);
  CHECK_THROWS_AS(ensemble_incorrect({}), Error);
}

TEST_CASE("predicted accuracy") {
  CHECK(predicted_accuracy(std::vector<Label>{C, C, I, I}) == 0.5);
  CHECK(predicted_accuracy(std::vector<Label>{C, C}) == 1.0);
  std::vector<Label> seven(10, I);
  std::fill(seven.begin(), seven.begin() + 7, C);
  CHECK(predicted_accuracy(seven) == doctest::Approx(0.7));
  CHECK_THROWS_AS(predicted_accuracy(std::vector<Label>{}), Error);
}

TEST_CASE("two instances: mixed column and all-correct column give a lower bound of one half") {
  const BoundsReport b = bounds(from_labels({{C, C}, {I, C}, {C, C}}));
  CHECK(b.lower == 0.5);
  CHECK(b.upper == 1.0);
}

TEST_CASE("hand-enumerated 2x2 grid") {
  // member1 = [C, I], member2 = [I, I]: column 1 has one Correct vote, column 2
  // none, so ensemble_correct = [C, I] and ensemble_incorrect = [I, I].
  const BoundsReport b = bounds(from_labels({{C, I}, {I, I}}));
  CHECK(b.upper == 0.5);
  CHECK(b.lower == 0.0);
  CHECK(b.mean_bounds == 0.25);
  CHECK(b.per_member_acc == std::vector<double>{0.5, 0.0});
  CHECK(b.mean_discrim == 0.25);
  CHECK(b.n_instances == 2);
}

TEST_CASE("single member collapses the interval") {
  const BoundsReport b = bounds(from_labels({{C, I, C, C}}));
  CHECK(b.lower == b.upper);
  CHECK(b.lower == b.per_member_acc[0]);
}

TEST_CASE("nesting and monotonicity over random matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t members = 1 + rng.below(9);
    const std::size_t n = 1 + rng.below(200);
    const VerdictMatrix m = random_matrix(rng, members, n);
    const BoundsReport b = bounds(m);
    for (double acc : b.per_member_acc) {
      CHECK(b.lower <= acc);
      CHECK(acc <= b.upper);
    }
    auto rows = m.rows();
    std::vector<Verdict> extra;
    for (std::size_t i = 0; i < n; ++i) extra.emplace_back(rng.uniform());
    rows.push_back(extra);
    const BoundsReport grown = bounds(VerdictMatrix(m.instance_ids(), rows));
    CHECK(grown.lower <= b.lower);
    CHECK(grown.upper >= b.upper);
  }
}

TEST_CASE("order statistics") {
  CHECK(order_statistic_index(1000, 0.025) == 24);
  CHECK(order_statistic_index(1000, 0.975) == 974);
  CHECK(order_statistic_index(50, 0.025) == 1);
  CHECK(order_statistic_index(50, 0.975) == 48);
  CHECK(order_statistic_index(10, 0.0) == 0);
  CHECK(order_statistic_index(10, 1.0) == 9);
}

TEST_CASE("bootstrap intervals") {
  const std::vector<double> ones(100, 1.0);
  const std::vector<double> zeros(100, 0.0);
  CHECK(bootstrap_ci(ones) == Interval{1.0, 1.0});
  CHECK(bootstrap_ci(zeros) == Interval{0.0, 0.0});
  CHECK_THROWS_AS(bootstrap_ci(std::vector<double>{}), Error);

  const std::vector<double> half(100, 0.5);
  const Interval ci = bootstrap_ci(half, 1000, 0.05, 3);
  const double closed_form = 2 * 1.96 * std::sqrt(0.25 / 100);
  CHECK(ci.contains(0.5));
  CHECK(std::abs(ci.width() - closed_form) <= 0.04);
  CHECK(bootstrap_ci(half, 1000, 0.05, 3) == ci);
}

TEST_CASE("bootstrap attaches one interval per member") {
  Rng rng(5);
  const VerdictMatrix m = random_matrix(rng, 3, 50);
  BoundsReport b = bounds(m);
  CHECK(b.ci.empty());
  attach_bootstrap(b, m, 200, 0.05, 1);
  REQUIRE(b.ci.size() == 3);
  for (const auto& c : b.ci) {
    REQUIRE(c.has_value());
    CHECK(c->lo <= c->hi);
  }
}

TEST_CASE("subset robustness") {
  Rng rng(8);
  const std::size_t n = 60;
  const VerdictMatrix m = random_matrix(rng, 4, n);
  std::vector<Label> gold;
  for (std::size_t i = 0; i < n; ++i) gold.push_back(rng.bernoulli(0.6) ? C : I);

  SUBCASE("full size gives zero-width intervals at the full-set values") {
    const std::vector<std::size_t> sizes{n};
    const auto rows = subset_robustness(m, gold, sizes, 50, 1);
    REQUIRE(rows.size() == 1);
    const BoundsReport b = bounds(m);
    CHECK(rows[0].lower == Interval{b.lower, b.lower});
    CHECK(rows[0].upper == Interval{b.upper, b.upper});
    CHECK(rows[0].gold.width() == 0.0);
  }
  SUBCASE("size one gives gold accuracies in {0, 1}") {
    const std::vector<std::size_t> sizes{1};
    const auto rows = subset_robustness(m, gold, sizes, 50, 1);
    CHECK((rows[0].gold.lo == 0.0 || rows[0].gold.lo == 1.0));
    CHECK((rows[0].gold.hi == 0.0 || rows[0].gold.hi == 1.0));
  }
  SUBCASE("intervals come from bounds recomputed on the sampled columns") {
    // Recompute every resample independently with the same seed schedule.
    const std::size_t size = 20;
    const std::uint64_t seed = 77;
    const std::vector<std::size_t> sizes{size};
    const auto rows = subset_robustness(m, gold, sizes, 50, seed);
    std::vector<double> lowers;
    std::vector<double> uppers;
    std::vector<double> golds;
    for (std::size_t r = 0; r < 50; ++r) {
      Rng sample_rng(mix_seed(mix_seed(seed, size), r));
      const auto cols = sample_rng.sample_indices(n, size);
      const VerdictMatrix sub = m.select(cols);
      double lo = 0;
      double hi = 0;
      double g = 0;
      for (std::size_t k = 0; k < size; ++k) {
        const auto column = sub.column(k);
        const bool any_c = std::any_of(column.begin(), column.end(), [](auto v) { return v.correct(); });
        const bool all_c = std::all_of(column.begin(), column.end(), [](auto v) { return v.correct(); });
        hi += any_c;
        lo += all_c;
        g += gold[cols[k]] == C;
      }
      lowers.push_back(lo / size);
      uppers.push_back(hi / size);
      golds.push_back(g / size);
    }
    auto pct = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return Interval{v[order_statistic_index(v.size(), 0.025)],
                      v[order_statistic_index(v.size(), 0.975)]};
    };
    CHECK(rows[0].lower == pct(lowers));
    CHECK(rows[0].upper == pct(uppers));
    CHECK(rows[0].gold == pct(golds));
  }
  SUBCASE("invalid sizes") {
    const std::vector<std::size_t> too_big{n + 1};
    CHECK_THROWS_AS(subset_robustness(m, gold, too_big), Error);
    const std::vector<std::size_t> zero{0};
    CHECK_THROWS_AS(subset_robustness(m, gold, zero), Error);
  }
}

TEST_CASE("perfect oracle verdicts reproduce gold accuracy") {
  const std::vector<Label> gold{C, I, C, C, I, C, I, C};
  const VerdictMatrix m = from_labels({gold, gold, gold});
  const BoundsReport b = bounds(m);
  CHECK(b.lower == predicted_accuracy(gold));
  CHECK(b.upper == predicted_accuracy(gold));
}
