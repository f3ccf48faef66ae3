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

// Reference implementations and helpers shared by the unit and acceptance
// tests. The oracles are deliberately naive.

#ifndef DDGF_TESTS_TESTING_HPP
#define DDGF_TESTS_TESTING_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ddgf/bit_matrix.hpp"
#include "ddgf/ddg_builder.hpp"
#include "ddgf/labels.hpp"

namespace ddgf::testing {

struct Graph {
  std::size_t n = 0;
  std::vector<Edge> edges;
};

// Multigraph with self-loops and parallel edges allowed.
inline Graph RandomGraph(std::mt19937_64& rng, std::size_t max_nodes, std::size_t max_edges) {
  Graph g;
  g.n = 1 + rng() % max_nodes;
  std::size_t m = rng() % (max_edges + 1);
  for (std::size_t i = 0; i < m; ++i) {
    g.edges.push_back({static_cast<std::uint32_t>(rng() % g.n), static_cast<std::uint32_t>(rng() % g.n)});
  }
  return g;
}

inline std::vector<std::uint32_t> RandomPermutation(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::uint32_t> p(n);
  std::iota(p.begin(), p.end(), 0u);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Relabels nodes by `perm` and shuffles edge order.
inline Graph Permute(const Graph& g, const std::vector<std::uint32_t>& perm, std::mt19937_64& rng) {
  Graph out{g.n, {}};
  for (const Edge& e : g.edges) out.edges.push_back({perm[e.src], perm[e.dst]});
  std::shuffle(out.edges.begin(), out.edges.end(), rng);
  return out;
}

inline std::vector<Edge> SortedEdges(std::vector<Edge> edges) {
  std::sort(edges.begin(), edges.end());
  return edges;
}

// Brute-force isomorphism by trying every node permutation.
inline bool Isomorphic(const Graph& a, const Graph& b) {
  if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
  const std::vector<Edge> target = SortedEdges(b.edges);
  std::vector<std::uint32_t> perm(a.n);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    std::vector<Edge> mapped;
    for (const Edge& e : a.edges) mapped.push_back({perm[e.src], perm[e.dst]});
    if (SortedEdges(mapped) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Every simple digraph (self-loops allowed, no parallel edges) on n <= 4
// nodes, one representative per isomorphism class. The canonical form is the
// smallest adjacency bitmask over all relabelings.
inline std::vector<Graph> AllDigraphClasses(std::size_t n) {
  const std::size_t cells = n * n;
  std::vector<std::vector<std::uint32_t>> perms;
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  do {
    perms.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<bool> seen(std::size_t{1} << cells, false);
  std::vector<Graph> classes;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (seen[mask]) continue;
    for (const auto& p : perms) {
      std::uint32_t image = 0;
      for (std::size_t c = 0; c < cells; ++c) {
        if (mask >> c & 1u) image |= 1u << (p[c / n] * n + p[c % n]);
      }
      seen[image] = true;
    }
    Graph g{n, {}};
    for (std::size_t c = 0; c < cells; ++c) {
      if (mask >> c & 1u) g.edges.push_back({static_cast<std::uint32_t>(c / n), static_cast<std::uint32_t>(c % n)});
    }
    classes.push_back(std::move(g));
  }
  return classes;
}

inline BitMatrix RandomBitMatrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                 unsigned density_percent = 50) {
  BitMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() % 100 < density_percent) m.Set(r, c);
    }
  }
  return m;
}

inline std::size_t NaiveHamming(const BitMatrix& a, std::size_t i, const BitMatrix& b, std::size_t j) {
  std::size_t d = 0;
  for (std::size_t c = 0; c < a.cols(); ++c) d += a.Get(i, c) != b.Get(j, c);
  return d;
}

// kNN by sorting the full (distance, index) list, then voting with the same
// tie policy as the library.
inline ClassLabel NaiveKnn(const std::vector<std::size_t>& distances, const std::vector<ClassLabel>& labels,
                           std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> order;
  for (std::size_t i = 0; i < distances.size(); ++i) order.push_back({distances[i], i});
  std::sort(order.begin(), order.end());
  std::map<ClassLabel, std::pair<std::size_t, std::size_t>> votes;  // label -> (count, sum)
  for (std::size_t i = 0; i < k; ++i) {
    auto& v = votes[labels[order[i].second]];
    v.first += 1;
    v.second += order[i].first;
  }
  ClassLabel best = 0;
  std::tuple<long long, std::size_t, ClassLabel> best_key{1, 0, 0};
  for (const auto& [label, v] : votes) {
    std::tuple<long long, std::size_t, ClassLabel> key{-static_cast<long long>(v.first), v.second, label};
    if (best == 0 || key < best_key) {
      best = label;
      best_key = key;
    }
  }
  return best;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("ddgf_" + tag + "_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ddgf::testing

#endif  // DDGF_TESTS_TESTING_HPP
