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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace accbound {

enum class Label : std::uint8_t { kCorrect, kIncorrect };

enum class PairSource : std::uint8_t { kGold, kCheckpointBeam, kNoise };

const char* to_string(Label label) noexcept;
const char* to_string(PairSource source) noexcept;
Label parse_label(std::string_view text);
PairSource parse_source(std::string_view text);

struct BeamCandidate {
  std::string sequence;
  double confidence = 1.0;  // (0, 1]; product of per-token probabilities

  friend bool operator==(const BeamCandidate&, const BeamCandidate&) = default;
};

// One test instance: the input sentence, the parser's top prediction, its
// scored beam, and the gold sequence when annotated.
struct PredictionRecord {
  std::string id;
  std::string input;
  std::string prediction;
  std::vector<BeamCandidate> beam;
  std::optional<std::string> gold;

  // Exact match of prediction and gold after whitespace normalization.
  // Throws kValidation when gold is absent.
  bool is_correct() const;

  // beam[0].confidence; absent for an empty beam.
  std::optional<double> confidence() const;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct TrainingPair {
  std::string input;
  std::string output;
  Label label = Label::kIncorrect;
  PairSource source = PairSource::kGold;

  friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

// Verdict of a single discriminator. The label is derived from the
// probability of the Correct class with a fixed 0.5 threshold (ties go to
// Correct), so the two can never disagree.
class Verdict {
 public:
  static constexpr double kThreshold = 0.5;

  Verdict() = default;
  explicit Verdict(double probability_correct);

  static Verdict of(Label label) {
    return Verdict(label == Label::kCorrect ? 1.0 : 0.0);
  }

  double probability() const noexcept { return probability_; }
  Label label() const noexcept {
    return probability_ >= kThreshold ? Label::kCorrect : Label::kIncorrect;
  }
  bool correct() const noexcept { return label() == Label::kCorrect; }

  friend bool operator==(const Verdict&, const Verdict&) = default;

 private:
  double probability_ = kThreshold;
};

// Externally computed verdict: lets any discriminator backend feed the
// estimator by id.
struct ExternalVerdict {
  std::string id;
  std::size_t member_index = 0;
  double probability = 0.5;

  friend bool operator==(const ExternalVerdict&, const ExternalVerdict&) = default;
};

// Throws kValidation naming the offending field.
void validate(const PredictionRecord& record);
void validate(const TrainingPair& pair);

std::string serialize(const PredictionRecord& record);
PredictionRecord parse_record(std::string_view line);
std::string serialize(const TrainingPair& pair);
TrainingPair parse_pair(std::string_view line);

std::vector<PredictionRecord> read_records(const std::filesystem::path& path);
void write_records(const std::vector<PredictionRecord>& records,
                   const std::filesystem::path& path);

std::vector<TrainingPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::vector<TrainingPair>& pairs,
                 const std::filesystem::path& path);

std::vector<ExternalVerdict> read_external_verdicts(const std::filesystem::path& path);
void write_external_verdicts(const std::vector<ExternalVerdict>& verdicts,
                             const std::filesystem::path& path);

}  // namespace accbound
