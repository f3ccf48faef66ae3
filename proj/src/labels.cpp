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

#include "ddgf/labels.hpp"

#include <charconv>

#include "ddgf/common.hpp"
#include "ddgf/listing_parser.hpp"

namespace ddgf {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::string_view Unquote(std::string_view s) {
  s = Trim(s);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

}  // namespace

LabelMap ParseLabels(std::string_view csv) {
  LabelMap labels;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = Trim(csv.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) {
      throw ValidationError("labels line " + std::to_string(line_no) + ": expected id,class");
    }
    std::string_view id = Unquote(line.substr(0, comma));
    std::string_view cls = Unquote(line.substr(comma + 1));
    int value = 0;
    auto [ptr, ec] = std::from_chars(cls.data(), cls.data() + cls.size(), value);
    if (ec != std::errc() || ptr != cls.data() + cls.size()) {
      if (labels.empty() && line_no == 1) continue;  // header
      throw ValidationError("labels line " + std::to_string(line_no) + ": bad class '" +
                            std::string(cls) + "'");
    }
    if (!IsValidClass(value)) {
      throw ValidationError("labels line " + std::to_string(line_no) + ": class " +
                            std::to_string(value) + " outside 1.." + std::to_string(kNumClasses));
    }
    if (id.empty()) throw ValidationError("labels line " + std::to_string(line_no) + ": empty id");
    auto [it, inserted] = labels.emplace(std::string(id), value);
    if (!inserted && it->second != value) {
      throw ValidationError("labels line " + std::to_string(line_no) + ": conflicting label for " +
                            std::string(id));
    }
  }
  return labels;
}

LabelMap ReadLabels(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw ValidationError("labels file not found: " + path.string());
  }
  return ParseLabels(ReadFile(path));
}

std::string FormatLabel(const std::optional<ClassLabel>& label) {
  return label ? std::to_string(*label) : std::string("none");
}

}  // namespace ddgf
