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

#include <algorithm>

#include "ddgf/ddg_builder.hpp"
#include "ddgf/synthetic_corpus.hpp"
#include "doctest.h"

namespace ddgf {
namespace {

std::vector<Instruction> Parse(const std::string& text) { return ParseListing(text, "s"); }

DepGraph GraphOf(const std::vector<Instruction>& ins, const InstructionFilter& filter = DefaultInstructionFilter()) {
  Segment seg{"s", 0, 0, ins};
  return BuildGraph(seg, filter);
}

TEST_SUITE("ddg_builder") {

TEST_CASE("shared operand links a dependency chain") {
  auto ins = Parse(".text:1 8B C3 mov eax, ebx\n.text:3 8B C8 mov ecx, eax\n");
  DepGraph g = GraphOf(ins);
  CHECK(g.nodes == std::vector<std::string>{"eax", "ebx", "ecx"});
  // ebx -> eax, eax -> ecx
  CHECK(g.edges == std::vector<Edge>{{1, 0}, {0, 2}});
}

TEST_CASE("push and call give an empty graph") {
  auto ins = Parse(".text:1 56 push esi\n.text:2 E8 00 00 00 00 call foo\n");
  DepGraph g = GraphOf(ins);
  CHECK(g.empty());
  CHECK(g.edge_count() == 0);
}

TEST_CASE("repeated moves give parallel edges") {
  auto ins = Parse(".text:1 8B C3 mov eax, ebx\n.text:3 8B C3 mov eax, ebx\n");
  DepGraph g = GraphOf(ins);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 2);
  CHECK(g.edges[0] == g.edges[1]);
}

TEST_CASE("self move is a loop") {
  DepGraph g = GraphOf(Parse(".text:1 8B C0 mov eax, eax\n"));
  CHECK(g.node_count() == 1);
  CHECK(g.edges == std::vector<Edge>{{0, 0}});
}

TEST_CASE("single-operand filtered instructions add nothing") {
  DepGraph g = GraphOf(Parse(".text:1 40 inc eax\n"), {"inc"});
  CHECK(g.empty());
}

TEST_CASE("filter is configurable") {
  auto ins = Parse(".text:1 0F B6 C3 movzx eax, bl\n.text:4 87 D9 xchg ecx, ebx\n");
  CHECK(GraphOf(ins).empty());
  DepGraph g = GraphOf(ins, {"movzx", "xchg"});
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 2);
}

TEST_CASE("node identity is byte equality of normalized operands") {
  auto ins = Parse(
      ".text:1 8B 45 FC mov eax, [ebp+var_4]\n"
      ".text:4 89 45 FC mov [ebp+var_4], EAX\n"
      ".text:7 89 45 F8 mov [ebp+var_8], eax\n");
  DepGraph g = GraphOf(ins);
  CHECK(g.nodes == std::vector<std::string>{"eax", "[ebp+var_4]", "[ebp+var_8]"});
}

TEST_CASE("edge count equals filtered two-operand instructions, graphs are local") {
  for (const SyntheticSample& s : GenerateSyntheticSamples(1, 21)) {
    auto ins = ParseListing(s.listing, s.sample_id);
    auto segs = SegmentInstructions(ins);
    std::vector<DepGraph> forward, backward;
    for (const Segment& seg : segs) {
      DepGraph g = BuildGraph(seg);
      std::size_t expected = 0;
      for (const Instruction& i : seg.instructions) {
        if (i.mnemonic == "mov" && i.operands.size() >= 2) expected += i.operands.size() - 1;
      }
      CHECK(g.edge_count() == expected);
      CHECK(g.segment_index == seg.index);
      forward.push_back(std::move(g));
    }
    for (auto it = segs.rbegin(); it != segs.rend(); ++it) backward.push_back(BuildGraph(*it));
    std::reverse(backward.begin(), backward.end());
    CHECK(forward == backward);
  }
}

TEST_CASE("graph dump lists nodes and edges") {
  DepGraph g = GraphOf(Parse(".text:1 8B C3 mov eax, ebx\n"));
  std::string text = FormatGraph(g);
  CHECK(text.find("eax") != std::string::npos);
  CHECK(text.find("ebx") != std::string::npos);
  CHECK(text.find("n1 -> n0  (ebx -> eax)") != std::string::npos);
}

}  // TEST_SUITE

}  // namespace
}  // namespace ddgf
