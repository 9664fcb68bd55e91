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
#include "records.hpp"
#include "test_util.hpp"

using namespace accbound;
using accbound::testing::read_file;
using accbound::testing::scratch_dir;
using accbound::testing::write_file;

namespace {

PredictionRecord sample_record() {
  PredictionRecord r;
  r.id = "r1";
  r.input = "the bako dupe";
  r.prediction = "bako(x_1) AND dupe.agent(x_2,x_1)";
  r.beam = {{"bako(x_1) AND dupe.agent(x_2,x_1)", 0.8}, {"bako(x_1)", 0.1}};
  r.gold = "bako(x_1) AND dupe.agent(x_2,x_1)";
  return r;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kUndefined;
}

}  // namespace

TEST_CASE("labels and sources round-trip through text") {
  CHECK(parse_label("correct") == Label::kCorrect);
  CHECK(parse_label(to_string(Label::kIncorrect)) == Label::kIncorrect);
  CHECK(parse_source("checkpoint_beam") == PairSource::kCheckpointBeam);
  CHECK(parse_source(to_string(PairSource::kNoise)) == PairSource::kNoise);
  CHECK(kind_of([] { parse_label("maybe"); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { parse_source("oracle"); }) == ErrorKind::kValidation);
}

TEST_CASE("record correctness is exact match after whitespace normalization") {
  PredictionRecord r = sample_record();
  CHECK(r.is_correct());
  r.gold = "  bako(x_1)   AND dupe.agent(x_2,x_1) ";
  CHECK(r.is_correct());
  r.gold = "bako(x_1) AND dupe.agent(x_2,x_3)";
  CHECK_FALSE(r.is_correct());
  r.gold.reset();
  CHECK(kind_of([&] { (void)r.is_correct(); }) == ErrorKind::kValidation);
  CHECK(r.confidence() == 0.8);
  r.beam.clear();
  CHECK_FALSE(r.confidence().has_value());
}

TEST_CASE("record validation") {
  PredictionRecord r = sample_record();
  CHECK_NOTHROW(validate(r));
  r.beam[1].confidence = 0.9;
  CHECK(kind_of([&] { validate(r); }) == ErrorKind::kValidation);
  r = sample_record();
  r.beam[0].confidence = 0.0;
  CHECK(kind_of([&] { validate(r); }) == ErrorKind::kValidation);
  r = sample_record();
  r.prediction = "other";
  CHECK(kind_of([&] { validate(r); }) == ErrorKind::kValidation);
  r = sample_record();
  r.id.clear();
  CHECK(kind_of([&] { validate(r); }) == ErrorKind::kValidation);
}

TEST_CASE("verdict label follows probability") {
  CHECK(Verdict(0.5).label() == Label::kCorrect);
  CHECK(Verdict(0.4999).label() == Label::kIncorrect);
  CHECK(Verdict::of(Label::kCorrect).probability() == 1.0);
  CHECK(Verdict::of(Label::kIncorrect).probability() == 0.0);
  CHECK(kind_of([] { Verdict(1.5); }) == ErrorKind::kValidation);
  CHECK(kind_of([] { Verdict(-0.1); }) == ErrorKind::kValidation);
}

TEST_CASE("training pair validation") {
  TrainingPair p{"s", "o", Label::kCorrect, PairSource::kNoise};
  CHECK(kind_of([&] { validate(p); }) == ErrorKind::kValidation);
  p.source = PairSource::kGold;
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("records serialize with a fixed key order and round-trip") {
  const PredictionRecord r = sample_record();
  const std::string line = serialize(r);
  CHECK(line.find("\"id\"") < line.find("\"input\""));
  CHECK(line.find("\"input\"") < line.find("\"prediction\""));
  CHECK(line.find("\"beam\"") < line.find("\"gold\""));
  CHECK(parse_record(line) == r);

  PredictionRecord unlabeled = r;
  unlabeled.gold.reset();
  CHECK(serialize(unlabeled).find("gold") == std::string::npos);
  CHECK(parse_record(serialize(unlabeled)) == unlabeled);

  const TrainingPair p{"a b", "c(x_1)", Label::kIncorrect, PairSource::kCheckpointBeam};
  CHECK(parse_pair(serialize(p)) == p);
}

TEST_CASE("parse errors name the problem") {
  CHECK(kind_of([] { parse_record("{not json"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_record("[1,2]"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_record(R"({"id":"a","input":"x"})"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_record(R"({"id":3,"input":"x","prediction":"y"})"); }) ==
        ErrorKind::kParse);
  try {
    parse_record(R"({"id":"a","input":"x"})");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("prediction") != std::string::npos);
  }
}

TEST_CASE("record files") {
  const auto dir = scratch_dir("records");
  const auto path = dir / "r.jsonl";
  PredictionRecord a = sample_record();
  PredictionRecord b = sample_record();
  b.id = "r2";
  b.gold.reset();
  write_records({a, b}, path);
  CHECK(read_records(path) == std::vector<PredictionRecord>{a, b});

  write_file(path, serialize(a) + "\n\n" + serialize(b) + "\n");
  CHECK(read_records(path).size() == 2);

  write_file(path, serialize(a) + "\n" + serialize(a) + "\n");
  CHECK(kind_of([&] { read_records(path); }) == ErrorKind::kValidation);
  CHECK(kind_of([&] { write_records({a, a}, path); }) == ErrorKind::kValidation);

  write_file(path, serialize(a) + "\n{oops\n");
  try {
    read_records(path);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK(kind_of([&] { read_records(dir / "missing.jsonl"); }) == ErrorKind::kIo);
}

TEST_CASE("pair files reject duplicate normalized pairs") {
  const auto path = scratch_dir("pairs") / "p.jsonl";
  const TrainingPair a{"a b", "c(x_1)", Label::kIncorrect, PairSource::kNoise};
  const TrainingPair b{"a  b", " c(x_1)", Label::kIncorrect, PairSource::kCheckpointBeam};
  const TrainingPair c{"a b", "d(x_1)", Label::kCorrect, PairSource::kGold};
  write_pairs({a, c}, path);
  CHECK(read_pairs(path) == std::vector<TrainingPair>{a, c});
  CHECK(kind_of([&] { write_pairs({a, b}, path); }) == ErrorKind::kValidation);
}

TEST_CASE("external verdict files") {
  const auto path = scratch_dir("verdicts") / "v.jsonl";
  const std::vector<ExternalVerdict> v{{"r1", 0, 0.25}, {"r1", 1, 0.75}};
  write_external_verdicts(v, path);
  CHECK(read_external_verdicts(path) == v);
  CHECK(read_file(path).find("\"member_index\"") != std::string::npos);
  write_file(path, R"({"id":"r1","member_index":0,"probability":1.5})" "\n");
  CHECK(kind_of([&] { read_external_verdicts(path); }) == ErrorKind::kValidation);
}
