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
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "estimator.hpp"
#include "records.hpp"

namespace accbound {

struct DiscriminatorSpec {
  std::size_t n_features = std::size_t{1} << 18;  // power of two, >= 2^10
  std::vector<int> word_orders = {1, 2};
  std::vector<int> char_orders = {3};
  bool overlap = true;  // per-token "seen on the other side" indicators
  std::size_t epochs = 30;
  double learning_rate = 5.0;  // features are L2-normalized, so steps are large
  double bias_learning_rate = 0.25;
  double l2 = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
  friend bool operator==(const DiscriminatorSpec&, const DiscriminatorSpec&) = default;
};

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly increasing
  std::vector<double> value;

  double norm() const;
};

// Hashed word n-grams over `input <sep> output` plus character n-grams over
// the same concatenation, L2-normalized. With spec.overlap, every distinct
// output word also yields a feature keyed by whether it occurs in the input,
// and every input word one keyed by whether it occurs in the output. Throws
// kValidation on an empty side.
SparseVector featurize(std::string_view input, std::string_view output,
                       const DiscriminatorSpec& spec);

// F: (sentence, candidate) -> Correct / Incorrect. Implementations are
// immutable once built and safe to share across threads.
class Discriminator {
 public:
  virtual ~Discriminator() = default;
  virtual Verdict predict(std::string_view input, std::string_view output) const = 0;
};

class LinearDiscriminator final : public Discriminator {
 public:
  LinearDiscriminator(DiscriminatorSpec spec, std::vector<double> weights, double bias,
                      std::vector<double> epoch_losses = {});

  static LinearDiscriminator zero(const DiscriminatorSpec& spec);

  Verdict predict(std::string_view input, std::string_view output) const override;
  double score(const SparseVector& x) const;  // w . x + b

  const DiscriminatorSpec& spec() const noexcept { return spec_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double bias() const noexcept { return bias_; }
  // Mean logistic loss over the training set after each epoch.
  const std::vector<double>& epoch_losses() const noexcept { return epoch_losses_; }

 private:
  DiscriminatorSpec spec_;
  std::vector<double> weights_;
  double bias_ = 0.0;
  std::vector<double> epoch_losses_;
};

// Logistic regression by SGD; epoch e visits the pairs in an order drawn from
// mix_seed(spec.seed, e). Throws kTraining unless both labels are present.
LinearDiscriminator train(const std::vector<TrainingPair>& pairs, const DiscriminatorSpec& spec);

struct Ensemble {
  std::vector<LinearDiscriminator> members;
  std::vector<std::uint64_t> member_seeds;
};

// Member i uses seed spec.seed + i. Members train on separate threads when
// `parallel` is set; results are identical either way.
Ensemble train_ensemble(const std::vector<TrainingPair>& pairs, const DiscriminatorSpec& spec,
                        std::size_t n_members, bool parallel = true);

// Text model file: a version line, the settings as json, then one json line of
// sparse weights per member.
void save_ensemble(const Ensemble& ensemble, const std::filesystem::path& path);
Ensemble load_ensemble(const std::filesystem::path& path);

// Verdicts of every member on every record's top prediction.
VerdictMatrix predict_matrix(const Ensemble& ensemble, const std::vector<PredictionRecord>& records);

// Verdict matrix from an external-verdicts file. Every (member, record id)
// combination must appear exactly once.
VerdictMatrix matrix_from_external(const std::vector<ExternalVerdict>& verdicts,
                                   const std::vector<PredictionRecord>& records);

std::vector<ExternalVerdict> to_external(const VerdictMatrix& matrix);

}  // namespace accbound
