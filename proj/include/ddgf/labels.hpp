// Copyright 2026 The ddgf Authors. All Rights Reserved.
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

#ifndef DDGF_LABELS_HPP
#define DDGF_LABELS_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace ddgf {

// Malware family, 1..kNumClasses.
using ClassLabel = int;
inline constexpr int kNumClasses = 9;

inline bool IsValidClass(ClassLabel c) { return c >= 1 && c <= kNumClasses; }

using LabelMap = std::map<std::string, ClassLabel, std::less<>>;

// Parses trainLabels.csv: optional `"Id","Class"` header, then `"<id>",<class>`
// rows (quotes optional). Throws ValidationError naming the line on bad rows.
LabelMap ParseLabels(std::string_view csv);
LabelMap ReadLabels(const std::filesystem::path& path);

std::string FormatLabel(const std::optional<ClassLabel>& label);  // "none" if absent

}  // namespace ddgf

#endif  // DDGF_LABELS_HPP
