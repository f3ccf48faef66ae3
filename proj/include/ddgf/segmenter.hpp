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

#ifndef DDGF_SEGMENTER_HPP
#define DDGF_SEGMENTER_HPP

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddgf/listing_parser.hpp"

namespace ddgf {

// Control-transfer mnemonics that close a basic block.
class TerminatorSet {
 public:
  TerminatorSet() = default;
  explicit TerminatorSet(std::set<std::string> mnemonics);

  // Conditional jumps, jmp, call, ret/retn, loop*, int, iret.
  static TerminatorSet Default();
  // One mnemonic per line, '#' comments allowed. Throws ValidationError if
  // the file does not contain `call` and `jmp`.
  static TerminatorSet FromFile(const std::filesystem::path& path);

  bool Contains(std::string_view mnemonic) const {
    return mnemonics_.find(std::string(mnemonic)) != mnemonics_.end();
  }
  const std::set<std::string>& mnemonics() const { return mnemonics_; }

 private:
  std::set<std::string> mnemonics_;
};

struct SegmenterOptions {
  TerminatorSet terminators = TerminatorSet::Default();
  // A `proc` header also closes the running block.
  bool split_at_function_start = true;
};

// A basic block: a view into the sample's instruction stream. Only the last
// instruction can be a terminator. The view borrows from the vector passed to
// Segment(), which must outlive it.
struct Segment {
  std::string sample_id;
  std::size_t index = 0;
  std::size_t start = 0;  // offset of the first instruction in the stream
  std::span<const Instruction> instructions;

  std::size_t end() const { return start + instructions.size(); }
};

std::vector<Segment> SegmentInstructions(std::span<const Instruction> instructions,
                                         const SegmenterOptions& options = {});

// {"index":N,"start":S,"end":E} per line, `end` exclusive.
std::string SegmentIndexJsonl(std::span<const Segment> segments);

}  // namespace ddgf

#endif  // DDGF_SEGMENTER_HPP
