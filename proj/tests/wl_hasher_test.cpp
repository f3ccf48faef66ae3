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

#include <map>
#include <random>
#include <stdexcept>

#include "ddgf/digest.hpp"
#include "ddgf/wl_hasher.hpp"
#include "doctest.h"
#include "testing.hpp"

namespace ddgf {
namespace {

using testing::Graph;

GraphHash H(const Graph& g, int iterations = kDefaultWlIterations) { return WlHash(g.n, g.edges, iterations); }

TEST_SUITE("wl_hasher") {

TEST_CASE("single self-loop graphs hash alike") {
  CHECK(H({1, {{0, 0}}}) == H({1, {{0, 0}}}));
  CHECK(H({1, {{0, 0}}}) != H({1, {}}));
}

TEST_CASE("relabeled paths hash alike") {
  Graph abc{3, {{0, 1}, {1, 2}}};
  Graph xyz{3, {{2, 0}, {1, 2}}};  // 1 -> 2 -> 0
  REQUIRE(testing::Isomorphic(abc, xyz));
  CHECK(H(abc) == H(xyz));
}

TEST_CASE("path and triangle differ") {
  Graph path{3, {{0, 1}, {1, 2}}};
  Graph triangle{3, {{0, 1}, {1, 2}, {2, 0}}};
  CHECK(H(path) != H(triangle));
}

TEST_CASE("edge direction matters") {
  CHECK(H({3, {{0, 1}, {0, 2}}}) != H({3, {{1, 0}, {2, 0}}}));
}

TEST_CASE("parallel edges are counted") {
  CHECK(H({2, {{0, 1}}}) != H({2, {{0, 1}, {0, 1}}}));
}

TEST_CASE("a 2-cycle differs from a loop") {
  CHECK(H({2, {{0, 1}, {1, 0}}}) != H({2, {{0, 0}, {1, 1}}}));
}

TEST_CASE("directed 4-cycle differs from two 2-cycles") {
  Graph cycle{4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}};
  Graph pairs{4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}}};
  CHECK(H(cycle) != H(pairs));
}

TEST_CASE("rejects bad arguments") {
  CHECK_THROWS_AS(WlHash(2, std::vector<Edge>{{0, 2}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(WlHash(2, std::vector<Edge>{}, 0), std::invalid_argument);
}

TEST_CASE("hash is a fixed, host-independent value") {
  // Pinned digests guard the byte layout fed to BLAKE2b.
  Graph path{3, {{0, 1}, {1, 2}}};
  CHECK(H(path).Hex() == "6ecca3a291c6b3fa6bc792a36a6fc34b");
  CHECK(H({1, {{0, 0}}}).Hex() == "456f9a4c69e8095f6e64bfbf4492d4ec");
  CHECK(GraphHash::FromHex(H(path).Hex()) == H(path));
}

TEST_CASE("hex parsing rejects bad input") {
  CHECK_FALSE(GraphHash::FromHex("abc").has_value());
  CHECK_FALSE(GraphHash::FromHex(std::string(32, 'G')).has_value());
  CHECK_FALSE(GraphHash::FromHex(std::string(32, 'A')).has_value());
  CHECK(GraphHash::FromHex(std::string(32, 'a')).has_value());
}

TEST_CASE("hashing is invariant under node relabeling and edge order") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    Graph g = testing::RandomGraph(rng, 8, 16);
    Graph p = testing::Permute(g, testing::RandomPermutation(rng, g.n), rng);
    CHECK(H(g) == H(p));
  }
}

TEST_CASE("no collisions among non-isomorphic digraphs up to three nodes") {
  std::map<GraphHash, std::size_t> seen;
  std::size_t classes = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    for (const Graph& g : testing::AllDigraphClasses(n)) {
      ++classes;
      seen[H(g)]++;
    }
  }
  CHECK(classes == 2 + 10 + 104);
  CHECK(seen.size() == classes);
}

TEST_CASE("iteration count changes the digest") {
  Graph path{3, {{0, 1}, {1, 2}}};
  CHECK(H(path, 1) != H(path, 2));
}

TEST_CASE("dedupe") {
  GraphHash h1 = H({1, {}}), h2 = H({2, {{0, 1}}});
  std::vector<GraphHash> in{h1, h1, h2};
  CHECK(Dedupe(in) == std::set<GraphHash>{h1, h2});
  CHECK(Dedupe({}).empty());
  std::vector<GraphHash> reversed{h2, h1, h1};
  CHECK(Dedupe(reversed) == Dedupe(in));
}

TEST_CASE("digest helpers") {
  CHECK(TextDigestHex("abc") == TextDigestHex("abc"));
  CHECK(TextDigestHex("abc") != TextDigestHex("abd"));
  CHECK(TextDigestHex("").size() == 32);
  std::vector<std::uint8_t> bytes{0x00, 0xab, 0xff};
  CHECK(ToHex(bytes) == "00abff");
  Hasher128 a, b;
  a.UpdateU64(1);
  b.UpdateU64(1);
  CHECK(a.Final() == b.Final());
}

TEST_CASE("file digest is plain BLAKE2b-128 of the contents") {
  testing::TempDir dir("digest");
  WriteFile(dir.path() / "empty", "");
  WriteFile(dir.path() / "abc", "abc");
  CHECK(FileDigestHex(dir.path() / "empty") == "cae66941d9efbd404e4d88758ea67670");
  CHECK(FileDigestHex(dir.path() / "abc") == "cf4ab791c62b8d2b2109c90275287816");
  CHECK_THROWS(FileDigestHex(dir.path() / "missing"));
}

}  // TEST_SUITE

}  // namespace
}  // namespace ddgf
