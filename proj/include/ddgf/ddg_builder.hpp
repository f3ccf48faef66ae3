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

#ifndef DDGF_DDG_BUILDER_HPP
#define DDGF_DDG_BUILDER_HPP

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "ddgf/segmenter.hpp"

namespace ddgf {

struct Edge {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;

  auto operator<=>(const Edge&) const = default;
};

// Directed multigraph of operands inside one segment. Node i carries the
// normalized operand text nodes[i]; edges point in the direction data moves.
struct DepGraph {
  std::vector<std::string> nodes;
  std::vector<Edge> edges;
  std::string sample_id;
  std::size_t segment_index = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }
  bool empty() const { return nodes.empty(); }

  bool operator==(const DepGraph&) const = default;
};

using InstructionFilter = std::set<std::string>;

inline InstructionFilter DefaultInstructionFilter() { return {"mov"}; }

// One node per distinct operand string and one edge src -> dst per source
// operand of every filtered instruction with at least two operands. The first
// operand is the destination.
DepGraph BuildGraph(const Segment& segment,
                    const InstructionFilter& filter = DefaultInstructionFilter());

// Human-readable dump used by `ddgf graph`.
std::string FormatGraph(const DepGraph& graph);

}  // namespace ddgf

#endif  // DDGF_DDG_BUILDER_HPP
