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
#include <optional>
#include <span>

#include "records.hpp"

namespace accbound {

// TC: gold Correct, predicted Correct.   FC: gold Incorrect, predicted Correct.
// TI: gold Incorrect, predicted Incorrect. FI: gold Correct, predicted Incorrect.
struct Confusion {
  std::size_t tc = 0;
  std::size_t fc = 0;
  std::size_t ti = 0;
  std::size_t fi = 0;

  std::size_t total() const noexcept { return tc + fc + ti + fi; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

Confusion confusion(std::span<const Label> predicted, std::span<const Label> gold);

// Ratios with an empty denominator are absent rather than 0 or 1.
std::optional<double> correct_recall(const Confusion& c);    // TC / (TC + FI)
std::optional<double> incorrect_recall(const Confusion& c);  // TI / (TI + FC)
std::optional<double> correct_precision(const Confusion& c);    // TC / (TC + FC)
std::optional<double> incorrect_precision(const Confusion& c);  // TI / (TI + FI)

double absolute_error(double acc_gold, double acc_pred);

}  // namespace accbound
