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

#include "ddgf/segmenter.hpp"

#include <cctype>
#include <sstream>

#include "ddgf/common.hpp"

namespace ddgf {

TerminatorSet::TerminatorSet(std::set<std::string> mnemonics)
    : mnemonics_(std::move(mnemonics)) {}

TerminatorSet TerminatorSet::Default() {
  return TerminatorSet({
      "ja",   "jae",  "jb",    "jbe",    "jc",     "jcxz",  "je",
      "jecxz", "jg",  "jge",   "jl",     "jle",    "jna",   "jnae",
      "jnb",  "jnbe", "jnc",   "jne",    "jng",    "jnge",  "jnl",
      "jnle", "jno",  "jnp",   "jns",    "jnz",    "jo",    "jp",
      "jpe",  "jpo",  "js",    "jz",     "jmp",    "call",  "ret",
      "retn", "retf", "loop",  "loope",  "loopne", "loopnz", "loopz",
      "int",  "int3", "into",  "iret",   "iretd",
  });
}

TerminatorSet TerminatorSet::FromFile(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::set<std::string> mnemonics;
  std::string line;
  while (std::getline(in, line)) {
    std::string token = NormalizeOperand(line);
    if (token.empty() || token[0] == '#') continue;
    for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    mnemonics.insert(token);
  }
  if (!mnemonics.count("call") || !mnemonics.count("jmp")) {
    throw ValidationError("terminator set must contain call and jmp: " + path.string());
  }
  if (mnemonics.count("push")) {
    throw ValidationError("push cannot be a terminator: " + path.string());
  }
  return TerminatorSet(std::move(mnemonics));
}

std::vector<Segment> SegmentInstructions(std::span<const Instruction> instructions,
                                         const SegmenterOptions& options) {
  std::vector<Segment> segments;
  std::size_t start = 0;
  auto close = [&](std::size_t end) {
    if (end == start) return;
    segments.push_back(Segment{instructions[start].sample_id, segments.size(), start,
                               instructions.subspan(start, end - start)});
    start = end;
  };
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    if (options.split_at_function_start && instructions[i].function_start) close(i);
    if (options.terminators.Contains(instructions[i].mnemonic)) close(i + 1);
  }
  close(instructions.size());
  return segments;
}

std::string SegmentIndexJsonl(std::span<const Segment> segments) {
  std::ostringstream out;
  for (const Segment& seg : segments) {
    out << "{\"index\":" << seg.index << ",\"start\":" << seg.start
        << ",\"end\":" << seg.end() << "}\n";
  }
  return out.str();
}

}  // namespace ddgf
