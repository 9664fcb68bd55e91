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
#include <limits>
#include <set>

#include "baselines.hpp"
#include "error.hpp"
#include "rng.hpp"

using namespace accbound;

namespace {

ConfidenceSet make_set(std::vector<double> conf, std::optional<std::vector<bool>> gold = {}) {
  ConfidenceSet s;
  for (std::size_t i = 0; i < conf.size(); ++i) s.ids.push_back("i" + std::to_string(i));
  s.confidences = std::move(conf);
  s.gold_correct = std::move(gold);
  return s;
}

ConfidenceSet random_labeled(Rng& rng, std::size_t n) {
  std::vector<double> conf;
  std::vector<bool> gold;
  for (std::size_t i = 0; i < n; ++i) {
    // Distinct values on a 1/1000 grid keep the sweep free of ties.
    conf.push_back(0.001 * static_cast<double>(1 + rng.below(1000)));
    gold.push_back(rng.bernoulli(conf.back()));
  }
  std::sort(conf.begin(), conf.end());
  conf.erase(std::unique(conf.begin(), conf.end()), conf.end());
  gold.resize(conf.size());
  rng.shuffle(conf);
  return make_set(conf, gold);
}

// Candidate thresholds: 0 and every observed confidence, ascending.
std::vector<double> sweep(const ConfidenceSet& s) {
  std::set<double> t(s.confidences.begin(), s.confidences.end());
  t.insert(0.0);
  return {t.begin(), t.end()};
}

}  // namespace

TEST_CASE("records to confidence sets") {
  std::vector<PredictionRecord> recs(2);
  recs[0] = {"a", "x", "y", {{"y", 0.7}}, std::string("y")};
  recs[1] = {"b", "x", "z", {{"z", 0.4}}, std::string("y")};
  const ConfidenceSet s = ConfidenceSet::from_records(recs);
  CHECK(s.confidences == std::vector<double>{0.7, 0.4});
  REQUIRE(s.gold_correct.has_value());
  CHECK(*s.gold_correct == std::vector<bool>{true, false});
  CHECK(s.gold_accuracy() == 0.5);

  recs[1].gold.reset();
  CHECK_FALSE(ConfidenceSet::from_records(recs).gold_correct.has_value());

  recs[1].beam.clear();
  try {
    ConfidenceSet::from_records(recs);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefined);
    CHECK(std::string(e.what()).find("missing confidence") != std::string::npos);
  }
}

TEST_CASE("maxprob and average confidence") {
  const ConfidenceSet s = make_set({0.2, 0.5, 0.7, 0.9});
  CHECK(maxprob_estimate(s, 0.5) == 0.5);
  CHECK(maxprob_estimate(s, 0.0) == 1.0);
  CHECK(avg_confidence(s) == doctest::Approx(0.575));
  CHECK_THROWS_AS(maxprob_estimate(make_set({}), 0.5), Error);

  Rng rng(4);
  const ConfidenceSet r = random_labeled(rng, 80);
  double prev = 2.0;
  for (double g = 0.0; g <= 1.0; g += 0.05) {
    const double m = maxprob_estimate(r, g);
    CHECK(m <= prev);
    prev = m;
  }
  const auto [lo, hi] = std::minmax_element(r.confidences.begin(), r.confidences.end());
  CHECK(avg_confidence(r) >= *lo);
  CHECK(avg_confidence(r) <= *hi);
}

TEST_CASE("DOC") {
  CHECK(doc_estimate(0.9, 0.85, 0.70) == doctest::Approx(0.75));
  CHECK(doc_estimate(0.6, 0.8, 0.8) == 0.6);
  CHECK(doc_estimate(0.1, 0.9, 0.1) == 0.0);
  CHECK(doc_estimate(0.9, 0.1, 0.9) == 1.0);
}

TEST_CASE("ATC threshold") {
  const ConfidenceSet s = make_set({0.95, 0.1, 0.9, 0.2}, std::vector<bool>{true, false, true, false});
  const double g = atc_fit(s);
  CHECK(g == 0.9);
  CHECK(std::count_if(s.confidences.begin(), s.confidences.end(), [&](double c) { return c < g; }) == 2);

  const ConfidenceSet none = make_set({0.3, 0.6}, std::vector<bool>{true, true});
  CHECK(atc_fit(none) <= 0.3);
  CHECK(atc_estimate(none, atc_fit(none)) == 1.0);

  const ConfidenceSet all = make_set({0.3, 0.6}, std::vector<bool>{false, false});
  CHECK(atc_fit(all) > 0.6);
  CHECK(atc_estimate(all, atc_fit(all)) == 0.0);

  CHECK_THROWS_AS(atc_fit(make_set({0.5})), Error);
  CHECK(atc_estimate(make_set({0.95, 0.05}), 0.5) == 0.5);
  CHECK(atc_estimate(make_set({0.95, 0.05}), 0.01) == 1.0);
}

TEST_CASE("ATC matches a brute-force threshold sweep and is self-consistent") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const ConfidenceSet s = random_labeled(rng, 100);
    const auto& gold = *s.gold_correct;
    const auto errors = static_cast<std::size_t>(std::count(gold.begin(), gold.end(), false));
    // Smallest candidate whose below-count equals the error count.
    double oracle = std::numeric_limits<double>::quiet_NaN();
    for (double t : sweep(s)) {
      const auto below = static_cast<std::size_t>(
          std::count_if(s.confidences.begin(), s.confidences.end(), [&](double c) { return c < t; }));
      if (below == errors) {
        oracle = t;
        break;
      }
    }
    if (errors < s.confidences.size()) {
      REQUIRE_FALSE(std::isnan(oracle));
      if (errors > 0) CHECK(atc_fit(s) == oracle);
    }
    const double n = static_cast<double>(s.confidences.size());
    CHECK(std::abs(atc_estimate(s, atc_fit(s)) - s.gold_accuracy()) <= 1.0 / n + 1e-12);
  }
}

TEST_CASE("Maxprob oracle matches a brute-force sweep") {
  Rng rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const ConfidenceSet s = random_labeled(rng, 60);
    const auto& gold = *s.gold_correct;
    const double n_c = static_cast<double>(std::count(gold.begin(), gold.end(), true));
    const double n_i = static_cast<double>(gold.size()) - n_c;
    if (n_c == 0 || n_i == 0) continue;
    const double target_cr = rng.uniform();
    const double target_ir = rng.uniform();

    double best_cr = 2.0;
    double best_ir = 2.0;
    double g_u = 0.0;
    double g_l = 0.0;
    for (double t : sweep(s)) {
      double tc = 0;
      double ti = 0;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool predicted_correct = s.confidences[i] > t;
        tc += gold[i] && predicted_correct;
        ti += !gold[i] && !predicted_correct;
      }
      if (std::abs(tc / n_c - target_cr) < best_cr) {
        best_cr = std::abs(tc / n_c - target_cr);
        g_u = t;
      }
      if (std::abs(ti / n_i - target_ir) < best_ir) {
        best_ir = std::abs(ti / n_i - target_ir);
        g_l = t;
      }
    }
    const OracleBounds o = maxprob_oracle_bounds(s, target_cr, target_ir);
    CHECK(o.gamma_upper == g_u);
    CHECK(o.gamma_lower == g_l);
    CHECK(o.upper == maxprob_estimate(s, g_u));
    CHECK(o.lower == maxprob_estimate(s, g_l));
  }
}

TEST_CASE("Maxprob oracle edge cases") {
  const ConfidenceSet s =
      make_set({0.9, 0.8, 0.3, 0.2, 0.6}, std::vector<bool>{true, true, false, false, true});
  const OracleBounds full_cr = maxprob_oracle_bounds(s, 1.0, 1.0);
  CHECK(full_cr.gamma_upper < 0.6);
  CHECK(full_cr.gamma_lower >= 0.3);

  const ConfidenceSet one_class = make_set({0.9, 0.8}, std::vector<bool>{true, true});
  try {
    maxprob_oracle_bounds(one_class, 0.5, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kUndefined);
  }
  CHECK_THROWS_AS(maxprob_oracle_bounds(make_set({0.5}), 0.5, 0.5), Error);
}
