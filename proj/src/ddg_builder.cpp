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

#include "ddgf/ddg_builder.hpp"

#include <sstream>
#include <unordered_map>

namespace ddgf {

DepGraph BuildGraph(const Segment& segment, const InstructionFilter& filter) {
  DepGraph graph;
  graph.sample_id = segment.sample_id;
  graph.segment_index = segment.index;

  std::unordered_map<std::string, std::uint32_t> ids;
  auto intern = [&](const std::string& operand) {
    auto [it, inserted] = ids.try_emplace(operand, static_cast<std::uint32_t>(graph.nodes.size()));
    if (inserted) graph.nodes.push_back(operand);
    return it->second;
  };

  for (const Instruction& ins : segment.instructions) {
    if (ins.operands.size() < 2 || !filter.count(ins.mnemonic)) continue;
    std::uint32_t dst = intern(ins.operands[0]);
    for (std::size_t i = 1; i < ins.operands.size(); ++i) {
      graph.edges.push_back(Edge{intern(ins.operands[i]), dst});
    }
  }
  return graph;
}

std::string FormatGraph(const DepGraph& graph) {
  std::ostringstream out;
  out << "sample " << graph.sample_id << " segment " << graph.segment_index << ": "
      << graph.node_count() << " nodes, " << graph.edge_count() << " edges\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << "  n" << i << " " << graph.nodes[i] << "\n";
  }
  for (const Edge& e : graph.edges) {
    out << "  n" << e.src << " -> n" << e.dst << "  (" << graph.nodes[e.src] << " -> "
        << graph.nodes[e.dst] << ")\n";
  }
  return out.str();
}

}  // namespace ddgf
