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

#include <string>
#include <string_view>
#include <vector>

namespace accbound {

// Collapses whitespace runs to single spaces and trims both ends. Sequences
// are compared for exact match only after this normalization.
std::string normalize_ws(std::string_view text);

bool same_sequence(std::string_view a, std::string_view b);

std::vector<std::string> split_ws(std::string_view text);

// Splits on a literal separator; an empty input yields an empty list.
std::vector<std::string> split_on(std::string_view text, std::string_view sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Shortest decimal that parses back to the same double.
std::string format_shortest(double value);

// Fixed-point with `digits` decimals, e.g. format_fixed(0.578 * 100, 1) == "57.8".
std::string format_fixed(double value, int digits);

}  // namespace accbound
