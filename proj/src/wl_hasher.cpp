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

#include "ddgf/wl_hasher.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace ddgf {
namespace {

using Label = Digest128;

// Little-endian byte buffer hashed in one shot.
class Buffer {
 public:
  void Tag(std::string_view tag) {
    U64(tag.size());
    bytes_.insert(bytes_.end(), tag.begin(), tag.end());
  }
  void U64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void Put(const Label& label) { bytes_.insert(bytes_.end(), label.begin(), label.end()); }
  void Clear() { bytes_.clear(); }

  Label Digest() const {
    Label out{};
    crypto_generichash(out.data(), out.size(), bytes_.data(), bytes_.size(), nullptr, 0);
    return out;
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

struct Neighbor {
  std::uint32_t node;
  std::uint32_t out_count;  // edges this -> node
  std::uint32_t in_count;   // edges node -> this
};

struct Tuple {
  Label label;
  std::uint32_t out_count;
  std::uint32_t in_count;
  auto operator<=>(const Tuple&) const = default;
};

}  // namespace

std::optional<GraphHash> GraphHash::FromHex(std::string_view hex) {
  if (hex.size() != 32) return std::nullopt;
  Digest128 bytes{};
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < 16; ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    bytes[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return GraphHash(bytes);
}

GraphHash WlHash(std::size_t node_count, std::span<const Edge> edges, int iterations) {
  if (iterations < 1) throw std::invalid_argument("WL iterations must be >= 1");
  if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");

  std::vector<std::vector<Neighbor>> adjacency(node_count);
  std::vector<std::uint64_t> loops(node_count, 0);
  {
    std::vector<std::map<std::uint32_t, std::pair<std::uint32_t, std::uint32_t>>> counts(node_count);
    for (const Edge& e : edges) {
      if (e.src >= node_count || e.dst >= node_count) {
        throw std::invalid_argument("edge endpoint out of range");
      }
      if (e.src == e.dst) {
        ++loops[e.src];
        continue;
      }
      ++counts[e.src][e.dst].first;
      ++counts[e.dst][e.src].second;
    }
    for (std::size_t u = 0; u < node_count; ++u) {
      for (const auto& [v, c] : counts[u]) adjacency[u].push_back({v, c.first, c.second});
    }
  }

  Buffer buf;
  buf.Tag("ddgf.wl.init");
  std::vector<Label> labels(node_count, buf.Digest());
  std::vector<Label> history(labels);
  history.reserve(node_count * (static_cast<std::size_t>(iterations) + 1));

  std::vector<Label> next(node_count);
  std::vector<Tuple> tuples;
  for (int round = 0; round < iterations; ++round) {
    for (std::size_t u = 0; u < node_count; ++u) {
      tuples.clear();
      for (const Neighbor& n : adjacency[u]) {
        tuples.push_back({labels[n.node], n.out_count, n.in_count});
      }
      std::sort(tuples.begin(), tuples.end());
      buf.Clear();
      buf.Tag("ddgf.wl.node");
      buf.Put(labels[u]);
      buf.U64(loops[u]);
      buf.U64(tuples.size());
      for (const Tuple& t : tuples) {
        buf.Put(t.label);
        buf.U64(t.out_count);
        buf.U64(t.in_count);
      }
      next[u] = buf.Digest();
    }
    labels.swap(next);
    history.insert(history.end(), labels.begin(), labels.end());
  }

  std::sort(history.begin(), history.end());
  buf.Clear();
  buf.Tag("ddgf.wl.graph");
  buf.U64(node_count);
  buf.U64(edges.size());
  buf.U64(history.size());
  for (const Label& l : history) buf.Put(l);
  return GraphHash(buf.Digest());
}

std::set<GraphHash> Dedupe(std::span<const GraphHash> hashes) {
  return std::set<GraphHash>(hashes.begin(), hashes.end());
}

}  // namespace ddgf
