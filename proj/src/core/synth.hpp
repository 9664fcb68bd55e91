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
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "records.hpp"

// Synthetic semantic-parsing task: a small clause grammar whose sentences map
// to conjunct-list logical forms such as
//
//   the bako dupe a kifa  ->  bako(x_1) AND dupe.agent(x_2,x_1) AND
//                             dupe.theme(x_2,x_4) AND kifa(x_4)
//
// plus a simulated parser whose per-step corruption rate is controllable.
// Variables are 0-based token positions. The corruption mix of the simulated
// parser is a modeling choice; real checkpoints may err differently.
namespace accbound::synth {

enum class Category : std::uint8_t {
  kNoun,
  kAdjective,
  kTransitiveVerb,
  kIntransitiveVerb,
  kComplementVerb,
};

class Lexicon {
 public:
  static Lexicon build(std::size_t vocab_size);

  const std::vector<std::string>& words(Category cat) const;
  std::optional<Category> category_of(std::string_view word) const;
  std::size_t size() const;

 private:
  std::vector<std::string> nouns_;
  std::vector<std::string> adjectives_;
  std::vector<std::string> transitive_;
  std::vector<std::string> intransitive_;
  std::vector<std::string> complement_;
};

struct TaskConfig {
  std::size_t n_train = 1000;
  std::size_t n_test = 500;
  std::size_t n_dev = 0;  // 0 means "same as n_test"
  std::size_t grammar_depth = 3;
  std::size_t vocab_size = 40;
  std::uint64_t seed = 7;

  void validate() const;
};

struct Example {
  std::string sentence;
  std::string gold;
  std::vector<std::string> productions;  // multiset, sorted

  friend bool operator==(const Example&, const Example&) = default;
};

using ProductionPair = std::pair<std::string, std::string>;

struct Task {
  std::shared_ptr<const Lexicon> lexicon;
  std::vector<ProductionPair> held_out;  // never co-occur in train/dev/test_id
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test_id;
  std::vector<Example> test_ood;
};

// Deterministic under config.seed. OOD sentences each contain at least one
// held-out production pair; the other splits contain none.
Task generate_task(const TaskConfig& config);

// Re-derives a sentence with the grammar, independently of the generator.
// Throws kParse when the sentence is outside the language.
Example derive(const Lexicon& lexicon, std::string_view sentence);

bool contains_pair(const std::vector<std::string>& productions, const ProductionPair& pair);

// Balanced parentheses and `name(args) AND name(args) ...` surface syntax.
bool well_formed(std::string_view logical_form);

// Number of clause-embedding (ccomp) conjuncts.
std::size_t nesting_depth(std::string_view logical_form);

enum class Corruption : std::uint8_t {
  kTokenSubstitute,
  kConjunctDrop,
  kConjunctInsert,
};

// A simulated parser checkpoint. Each derivation step (one gold conjunct) is
// corrupted with probability `error_rate`; the decoder's per-step
// distribution puts its largest mass on the realized outcome, so the top beam
// item is the realized parse and its confidence is the product of per-step
// probabilities.
struct ParserModel {
  double error_rate = 0.0;
  std::vector<Corruption> corruption_kinds = {
      Corruption::kTokenSubstitute, Corruption::kConjunctDrop, Corruption::kConjunctInsert};
  std::uint64_t seed = 0;
  // Substitution and insertion draw replacement words from here; without a
  // lexicon they reuse predicates found in the gold form.
  std::shared_ptr<const Lexicon> lexicon;

  void validate() const;
};

std::vector<BeamCandidate> parse_with_beam(const ParserModel& model, std::string_view sentence,
                                           std::string_view gold, std::size_t beam_size);

std::vector<ParserModel> checkpoint_sequence(std::uint64_t base_seed,
                                             const std::vector<double>& error_rates,
                                             std::shared_ptr<const Lexicon> lexicon = nullptr);

// Runs the parser over a split and emits records with ids `<prefix>-<index>`.
std::vector<PredictionRecord> run_parser(const ParserModel& model,
                                         const std::vector<Example>& split,
                                         std::size_t beam_size, std::string_view id_prefix);

}  // namespace accbound::synth
