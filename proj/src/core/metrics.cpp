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

#include "metrics.hpp"

#include <cmath>

#include "error.hpp"

namespace accbound {

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Confusion confusion(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size()) {
    fail(ErrorKind::kInvalidArgument, "predicted and gold labels differ in length");
  }
  if (predicted.empty()) fail(ErrorKind::kInvalidArgument, "no labels to compare");
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool pred_correct = predicted[i] == Label::kCorrect;
    if (gold[i] == Label::kCorrect) {
      ++(pred_correct ? c.tc : c.fi);
    } else {
      ++(pred_correct ? c.fc : c.ti);
    }
  }
  return c;
}

std::optional<double> correct_recall(const Confusion& c) { return ratio(c.tc, c.tc + c.fi); }
std::optional<double> incorrect_recall(const Confusion& c) { return ratio(c.ti, c.ti + c.fc); }
std::optional<double> correct_precision(const Confusion& c) { return ratio(c.tc, c.tc + c.fc); }
std::optional<double> incorrect_precision(const Confusion& c) { return ratio(c.ti, c.ti + c.fi); }

double absolute_error(double acc_gold, double acc_pred) { return std::abs(acc_gold - acc_pred); }

}  // namespace accbound
