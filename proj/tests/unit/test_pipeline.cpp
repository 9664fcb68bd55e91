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

#include "error.hpp"
#include "pipeline.hpp"
#include "test_util.hpp"

using namespace accbound;

namespace {

std::vector<PredictionRecord> records(const std::vector<bool>& correct, bool with_gold) {
  std::vector<PredictionRecord> out;
  for (std::size_t i = 0; i < correct.size(); ++i) {
    PredictionRecord r;
    r.id = "r" + std::to_string(i);
    r.input = "s" + std::to_string(i);
    r.prediction = "p(x_1)";
    r.beam = {{"p(x_1)", 0.3 + 0.06 * static_cast<double>(i)}};
    if (with_gold) r.gold = correct[i] ? "p(x_1)" : "q(x_1)";
    out.push_back(r);
  }
  return out;
}

VerdictMatrix matrix(const std::vector<std::vector<double>>& probs) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < probs.front().size(); ++i) ids.push_back("r" + std::to_string(i));
  std::vector<std::vector<Verdict>> rows;
  for (const auto& row : probs) {
    std::vector<Verdict> r;
    for (double p : row) r.emplace_back(p);
    rows.push_back(std::move(r));
  }
  return VerdictMatrix(ids, rows);
}

E2EConfig small_e2e(std::uint64_t seed) {
  E2EConfig c;
  c.apply_seed(seed);
  c.synth.task.n_train = 300;
  c.synth.task.n_test = 100;
  c.members = 3;
  c.discriminator.n_features = 1 << 14;
  c.discriminator.epochs = 10;
  c.evaluation.bootstrap_samples = 100;
  c.evaluation.subset_sizes = {20, 50, 5000};
  c.evaluation.resamples = 20;
  return c;
}

const std::vector<bool> kGold{true, true, false, true, false, true, true, false, true, true};
const std::vector<std::vector<double>> kProbs{
    {0.9, 0.8, 0.2, 0.7, 0.6, 0.9, 0.1, 0.3, 0.9, 0.8},
    {0.9, 0.3, 0.1, 0.7, 0.2, 0.9, 0.6, 0.1, 0.9, 0.8},
};

}  // namespace

TEST_CASE("evaluating a labelled split") {
  EvaluationOptions opt;
  opt.bootstrap_samples = 50;
  opt.subset_sizes = {5, 11};
  opt.resamples = 10;
  const SplitReport r = evaluate_split("ID", matrix(kProbs), records(kGold, true), opt);
  CHECK(r.bounds.upper == 0.8);
  CHECK(r.bounds.lower == 0.5);
  REQUIRE(r.gold.has_value());
  CHECK(*r.gold == doctest::Approx(0.7));
  REQUIRE(r.recall.has_value());
  CHECK(r.recall->members.size() == 2);
  CHECK(r.recall->upper == Confusion{7, 1, 2, 0});
  CHECK(r.bounds.ci.size() == 2);
  REQUIRE(r.subsets.size() == 1);
  CHECK(r.subsets[0].size == 5);

  const auto j = to_json(r);
  CHECK(j.at("split") == "ID");
  CHECK(j.at("gold_within_bounds") == true);
  CHECK(j.contains("ae"));
  CHECK(j.at("recall").at("upper").at("tc") == 7);
  CHECK(j.at("subsets").size() == 1);
  CHECK(to_json(std::vector<SplitReport>{r}).at("splits").size() == 1);

  CHECK_THROWS_AS(evaluate_split("x", matrix(kProbs), records({true}, true), opt), Error);
}

TEST_CASE("unlabelled splits omit gold, recall and AE") {
  EvaluationOptions opt;
  opt.bootstrap_samples = 0;
  opt.subset_sizes = {5};
  const SplitReport r = evaluate_split("OOD", matrix(kProbs), records(kGold, false), opt);
  CHECK_FALSE(r.gold.has_value());
  CHECK_FALSE(r.recall.has_value());
  CHECK(r.subsets.empty());
  CHECK(r.bounds.ci.empty());
  const auto j = to_json(r);
  CHECK_FALSE(j.contains("gold"));
  CHECK_FALSE(j.contains("ae"));

  const std::string table = render_table({r});
  CHECK(table.find("OOD Acc") != std::string::npos);
  CHECK(table.find("AE") == std::string::npos);
  CHECK(table.find("Gold") == std::string::npos);
  CHECK(table.find("80.0") != std::string::npos);
  CHECK(table.find("50.0") != std::string::npos);
}

TEST_CASE("tables with gold carry AE columns") {
  EvaluationOptions opt;
  opt.bootstrap_samples = 0;
  const std::vector<SplitReport> reports{
      evaluate_split("ID", matrix(kProbs), records(kGold, true), opt),
      evaluate_split("OOD", matrix(kProbs), records(kGold, false), opt)};
  const std::string table = render_table(reports);
  CHECK(table.find("ID AE") != std::string::npos);
  CHECK(table.find("OOD AE") == std::string::npos);
  CHECK(table.find("Gold") != std::string::npos);
  CHECK(table.find("Mean_bounds") != std::string::npos);
  // Mean_bounds 65.0 against gold 70.0.
  CHECK(table.find("65.0") != std::string::npos);
  CHECK(table.find("5.0 ") != std::string::npos);
  CHECK(render_recall_table(reports).find("ID CR") != std::string::npos);
  CHECK(render_recall_table(reports).find("OOD CR") == std::string::npos);
}

TEST_CASE("baselines on a split") {
  const auto test = records(kGold, true);
  EvaluationOptions opt;
  opt.bootstrap_samples = 0;
  const SplitReport r = evaluate_split("ID", matrix(kProbs), test, opt);
  const BaselineEstimates b = estimate_baselines(test, &test, &test, r.recall, 0.5);
  REQUIRE(b.doc.has_value());
  CHECK(*b.doc == doctest::Approx(0.7));
  REQUIRE(b.atc.has_value());
  CHECK(std::abs(*b.atc - 0.7) <= 0.1 + 1e-12);
  CHECK(b.oracle.has_value());

  const BaselineEstimates bare = estimate_baselines(records(kGold, false), nullptr, nullptr,
                                                    std::nullopt, 0.5);
  CHECK_FALSE(bare.doc.has_value());
  CHECK_FALSE(bare.atc.has_value());
  CHECK_FALSE(bare.oracle.has_value());
  CHECK(bare.maxprob == doctest::Approx(0.6));
}

TEST_CASE("small end-to-end run is deterministic and writes its artifacts") {
  const auto dir = accbound::testing::scratch_dir("pipeline");
  const E2EConfig c = small_e2e(3);
  const E2EResult a = run_e2e(c, dir / "a");
  const E2EResult b = run_e2e(c, dir / "b");
  REQUIRE(a.splits.size() == 2);
  CHECK(a.splits[0].name == "ID");
  CHECK(a.splits[1].name == "OOD");
  CHECK(a.table == b.table);
  for (const char* f : {"report.json", "report.txt", "train.jsonl", "test_ood.jsonl", "pairs.jsonl",
                        "model.txt", "ckpt_0.jsonl"}) {
    CAPTURE(f);
    REQUIRE(std::filesystem::exists(dir / "a" / f));
    CHECK(accbound::testing::read_file(dir / "a" / f) == accbound::testing::read_file(dir / "b" / f));
  }
  for (const auto& s : a.splits) {
    CHECK(s.bounds.lower <= s.bounds.upper);
    CHECK(s.baselines.has_value());
    // 5000 exceeds the split size and is skipped.
    REQUIRE(s.subsets.size() == 2);
    CHECK(s.subsets[1].size == 50);
  }
  const auto report = nlohmann::json::parse(accbound::testing::read_file(dir / "a" / "report.json"));
  CHECK(report.contains("training"));
  CHECK(report.at("splits").size() == 2);

  const E2EResult other = run_e2e(small_e2e(4));
  CHECK(other.table != a.table);
}
