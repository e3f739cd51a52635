// Copyright 2026 The HM-SGE Authors.
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

#ifndef HMSGE_TSV_H_
#define HMSGE_TSV_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hmsge {

// Whole-file helpers; failures throw IoError naming the path.
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);

std::vector<std::string_view> SplitTabs(std::string_view line);

// Splits on '\n', dropping a trailing '\r' from each line and a final empty
// line. Line numbers are 1-based positions in the returned vector + 1.
std::vector<std::string_view> SplitLines(std::string_view text);

std::optional<double> ParseDouble(std::string_view field);

// Shortest representation that parses back to the same double.
std::string FormatDouble(double value);

}  // namespace hmsge

#endif  // HMSGE_TSV_H_
