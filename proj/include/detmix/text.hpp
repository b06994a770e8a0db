// Copyright 2026 The detmix Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace detmix {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);
// Fixed-point with `decimals` digits.
std::string format_fixed(double v, int decimals);

// Whole-string parses; throw detmix::Error on malformed input.
double parse_double(std::string_view text);
long long parse_int(std::string_view text);
unsigned long long parse_u64(std::string_view text);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_whitespace(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::vector<std::string> read_lines(std::string_view text);

}  // namespace detmix
