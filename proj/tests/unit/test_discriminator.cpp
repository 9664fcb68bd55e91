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

#include <cmath>
#include <set>

#include "discriminator.hpp"
#include "error.hpp"
#include "pipeline.hpp"
#include "test_util.hpp"

using namespace accbound;

namespace {

// Label is "output contains token Z": linearly separable through the unigram
// feature for Z.
std::vector<TrainingPair> separable_pairs() {
  std::vector<TrainingPair> pairs;
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "f"};
  for (std::size_t i = 0; i < words.size(); ++i) {
    for (std::size_t j = 0; j < words.size(); ++j) {
      const std::string input = "in " + words[i] + " " + words[j];
      pairs.push_back({input, words[i] + " " + words[j] + " Z", Label::kCorrect, PairSource::kGold});
      pairs.push_back({input, words[j] + " " + words[i], Label::kIncorrect, PairSource::kNoise});
    }
  }
  return pairs;
}

DiscriminatorSpec small_spec() {
  DiscriminatorSpec s;
  s.n_features = 1 << 12;
  s.epochs = 10;
  s.seed = 3;
  return s;
}

}  // namespace

TEST_CASE("settings validation") {
  DiscriminatorSpec s;
  CHECK_NOTHROW(s.validate());
  s.n_features = 1000;
  CHECK_THROWS_AS(s.validate(), Error);
  s = DiscriminatorSpec{};
  s.n_features = 1 << 9;
  CHECK_THROWS_AS(s.validate(), Error);
  s = DiscriminatorSpec{};
  s.epochs = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = DiscriminatorSpec{};
  s.learning_rate = 0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = DiscriminatorSpec{};
  s.l2 = -1;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("featurize") {
  const DiscriminatorSpec s = small_spec();
  const SparseVector a = featurize("the bako dupe", "bako(x_1)", s);
  const SparseVector b = featurize("the bako dupe", "bako(x_1)", s);
  CHECK(a.index == b.index);
  CHECK(a.value == b.value);
  CHECK(a.norm() == doctest::Approx(1.0));
  for (std::size_t i = 0; i < a.index.size(); ++i) {
    CHECK(a.index[i] < s.n_features);
    if (i > 0) CHECK(a.index[i - 1] < a.index[i]);
  }
  const SparseVector left = featurize("a b", "c", s);
  const SparseVector right = featurize("a", "b c", s);
  CHECK((left.index != right.index || left.value != right.value));
  CHECK_THROWS_AS(featurize("", "x", s), Error);
  CHECK_THROWS_AS(featurize("x", "  ", s), Error);
}

TEST_CASE("zero model predicts one half, labelled Correct") {
  const auto m = LinearDiscriminator::zero(small_spec());
  const Verdict v = m.predict("a b", "c");
  CHECK(v.probability() == 0.5);
  CHECK(v.label() == Label::kCorrect);
}

TEST_CASE("separable toy set is fit exactly") {
  const auto pairs = separable_pairs();
  const auto model = train(pairs, small_spec());
  std::size_t right = 0;
  for (const auto& p : pairs) right += model.predict(p.input, p.output).label() == p.label;
  CHECK(right == pairs.size());
  const auto& seen_negative = pairs[1];
  CHECK(model.predict(seen_negative.input, seen_negative.output).label() == Label::kIncorrect);
  CHECK(model.predict(seen_negative.input, seen_negative.output) ==
        model.predict(seen_negative.input, seen_negative.output));

  const auto& losses = model.epoch_losses();
  REQUIRE(losses.size() == 10);
  CHECK(losses.back() < losses.front());
}

TEST_CASE("training is deterministic and rejects single-label sets") {
  const auto pairs = separable_pairs();
  const auto a = train(pairs, small_spec());
  const auto b = train(pairs, small_spec());
  CHECK(a.weights() == b.weights());
  CHECK(a.bias() == b.bias());

  std::vector<TrainingPair> only_correct;
  for (const auto& p : pairs) {
    if (p.label == Label::kCorrect) only_correct.push_back(p);
  }
  try {
    train(only_correct, small_spec());
    FAIL("expected a training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTraining);
  }
}

TEST_CASE("ensembles") {
  const auto pairs = separable_pairs();
  const DiscriminatorSpec s = small_spec();
  const Ensemble parallel = train_ensemble(pairs, s, 5, true);
  const Ensemble serial = train_ensemble(pairs, s, 5, false);
  REQUIRE(parallel.members.size() == 5);
  CHECK(parallel.member_seeds == std::vector<std::uint64_t>{3, 4, 5, 6, 7});
  std::set<std::vector<double>> distinct;
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(parallel.members[i].weights() == serial.members[i].weights());
    CHECK(parallel.members[i].spec().seed == s.seed + i);
    distinct.insert(parallel.members[i].weights());
  }
  CHECK(distinct.size() == 5);
  CHECK_THROWS_AS(train_ensemble(pairs, s, 0), Error);

  std::vector<PredictionRecord> recs(2);
  recs[0] = {"r0", "in a b", "a b Z", {{"a b Z", 0.9}}, std::nullopt};
  recs[1] = {"r1", "in a b", "b a", {{"b a", 0.9}}, std::nullopt};
  const Ensemble one = train_ensemble(pairs, s, 1);
  const BoundsReport b = bounds(predict_matrix(one, recs));
  CHECK(b.lower == b.upper);
}

TEST_CASE("model files round-trip") {
  const auto dir = accbound::testing::scratch_dir("model");
  const Ensemble e = train_ensemble(separable_pairs(), small_spec(), 3);
  save_ensemble(e, dir / "m.txt");
  const std::string text = accbound::testing::read_file(dir / "m.txt");
  CHECK(text.rfind("accbound-ensemble 1\n", 0) == 0);
  const Ensemble loaded = load_ensemble(dir / "m.txt");
  REQUIRE(loaded.members.size() == 3);
  CHECK(loaded.member_seeds == e.member_seeds);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(loaded.members[i].weights() == e.members[i].weights());
    CHECK(loaded.members[i].bias() == e.members[i].bias());
    CHECK(loaded.members[i].spec() == e.members[i].spec());
  }
  accbound::testing::write_file(dir / "bad.txt", "something else\n");
  CHECK_THROWS_AS(load_ensemble(dir / "bad.txt"), Error);
}

TEST_CASE("external verdicts") {
  std::vector<PredictionRecord> recs(2);
  recs[0] = {"r0", "x", "y", {}, std::nullopt};
  recs[1] = {"r1", "x", "z", {}, std::nullopt};
  const std::vector<ExternalVerdict> ext{{"r1", 0, 0.2}, {"r0", 0, 0.9}, {"r0", 1, 0.1}, {"r1", 1, 0.6}};
  const VerdictMatrix m = matrix_from_external(ext, recs);
  CHECK(m.members() == 2);
  CHECK(m.instance_ids() == std::vector<std::string>{"r0", "r1"});
  CHECK(m.row(0)[0].probability() == 0.9);
  CHECK(m.row(1)[1].probability() == 0.6);
  CHECK(matrix_from_external(to_external(m), recs).rows() == m.rows());

  auto missing = ext;
  missing.pop_back();
  CHECK_THROWS_AS(matrix_from_external(missing, recs), Error);
  auto dup = ext;
  dup.push_back({"r0", 0, 0.5});
  CHECK_THROWS_AS(matrix_from_external(dup, recs), Error);
  auto unknown = ext;
  unknown.push_back({"r9", 0, 0.5});
  CHECK_THROWS_AS(matrix_from_external(unknown, recs), Error);
}

TEST_CASE("a trained member beats chance on a balanced held-out slice of the synthetic task") {
  SynthConfig sc;
  sc.task.n_train = 1000;
  sc.task.n_test = 500;
  sc.seed = 31;
  const SynthOutput data = synthesize(sc);
  std::vector<GoldPair> gold;
  for (const auto& ex : data.task.train) gold.emplace_back(ex.sentence, ex.gold);
  HarvestConfig hc;
  hc.seed = 5;
  const TrainingSet set = build_training_set(gold, data.checkpoint_dumps, hc);
  DiscriminatorSpec spec;
  spec.seed = 9;
  const LinearDiscriminator model = train(set.pairs, spec);

  std::vector<const PredictionRecord*> right;
  std::vector<const PredictionRecord*> wrong;
  for (const auto& r : data.test_id) (r.is_correct() ? right : wrong).push_back(&r);
  const std::size_t k = std::min(right.size(), wrong.size());
  REQUIRE(k >= 30);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < k; ++i) {
    hits += model.predict(right[i]->input, right[i]->prediction).correct();
    hits += !model.predict(wrong[i]->input, wrong[i]->prediction).correct();
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(2 * k) > 0.65);
}
