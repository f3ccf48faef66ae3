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

#ifndef DDGF_WL_HASHER_HPP
#define DDGF_WL_HASHER_HPP

#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include "ddgf/ddg_builder.hpp"
#include "ddgf/digest.hpp"

namespace ddgf {

// Identifies the refinement scheme below. Recorded in fingerprint headers;
// bump it whenever the byte layout fed to the digest changes.
inline constexpr const char* kWlScheme = "wl-directed-pair/1";
inline constexpr int kDefaultWlIterations = 3;

// 128-bit isomorphism-invariant graph digest.
class GraphHash {
 public:
  GraphHash() = default;
  explicit GraphHash(const Digest128& bytes) : bytes_(bytes) {}

  // Accepts exactly 32 lowercase hex characters.
  static std::optional<GraphHash> FromHex(std::string_view hex);

  std::string Hex() const { return ToHex(bytes_); }
  const Digest128& bytes() const { return bytes_; }

  auto operator<=>(const GraphHash&) const = default;

 private:
  Digest128 bytes_{};
};

// Weisfeiler-Lehman refinement for directed multigraphs.
//
// Every node starts with the same label. Each round relabels node u with the
// digest of its current label and the sorted multiset of
//   (label(v), #edges u->v, #edges v->u)
// over the distinct neighbors v of u (a self-loop makes u its own neighbor).
// Carrying both edge counts per neighbor is strictly finer than separate in-
// and out-neighbor multisets: it tells a 2-cycle apart from two one-way edges,
// which plain directed WL cannot (e.g. a directed 4-cycle vs two 2-cycles).
//
// The graph digest covers (node count, edge count, sorted labels of all rounds
// including the initial one). Node ids and operand text never enter the
// digest. Throws std::invalid_argument if iterations < 1 or an edge endpoint
// is out of range.
GraphHash WlHash(std::size_t node_count, std::span<const Edge> edges,
                 int iterations = kDefaultWlIterations);

inline GraphHash WlHash(const DepGraph& graph, int iterations = kDefaultWlIterations) {
  return WlHash(graph.node_count(), graph.edges, iterations);
}

std::set<GraphHash> Dedupe(std::span<const GraphHash> hashes);

}  // namespace ddgf

#endif  // DDGF_WL_HASHER_HPP
