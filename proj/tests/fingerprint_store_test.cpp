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
#include <random>

#include "ddgf/common.hpp"
#include "ddgf/fingerprint_store.hpp"
#include "ddgf/synthetic_corpus.hpp"
#include "doctest.h"
#include "testing.hpp"

namespace ddgf {
namespace {

GraphHash Hash(int i) { return WlHash(static_cast<std::size_t>(i), std::vector<Edge>{}); }

Fingerprint Fp(std::string id, std::set<GraphHash> hashes, std::optional<ClassLabel> label = std::nullopt) {
  return Fingerprint{std::move(id), std::move(hashes), label};
}

TEST_SUITE("fingerprint_store") {

TEST_CASE("isomorphic segments collapse to one hash") {
  auto ins = ParseListing(
      ".text:1 8B C3 mov eax, ebx\n.text:3 74 00 jz short loc_1\n"
      ".text:5 8B CA mov ecx, edx\n.text:7 EB 00 jmp short loc_2\n",
      "s");
  auto segs = SegmentInstructions(ins);
  REQUIRE(segs.size() == 2);
  Fingerprint fp = BuildFingerprint("s", segs);
  CHECK(fp.hashes.size() == 1);
}

TEST_CASE("no segments give an empty fingerprint") {
  CHECK(BuildFingerprint("s", {}).hashes.empty());
  auto ins = ParseListing(".text:1 55 push ebp\n.text:2 C3 retn\n", "s");
  CHECK(BuildFingerprint("s", SegmentInstructions(ins)).hashes.empty());
}

TEST_CASE("vocabulary is the sorted union") {
  GraphHash h1 = std::min(Hash(1), Hash(2)), h2 = std::max(Hash(1), Hash(2));
  std::vector<Fingerprint> corpus{Fp("a", {h2, h1}), Fp("b", {h1})};
  Vocabulary v = BuildVocabulary(corpus);
  CHECK(v.hashes() == std::vector<GraphHash>{h1, h2});
  CHECK(v.dimension() == 2);
  CHECK(BuildVocabulary({}).dimension() == 0);
  std::reverse(corpus.begin(), corpus.end());
  CHECK(BuildVocabulary(corpus) == v);
  CHECK(Vocabulary::Parse(v.Serialize()) == v);
  CHECK(v.IndexOf(h2) == 1u);
  CHECK_FALSE(v.IndexOf(Hash(9)).has_value());
}

TEST_CASE("one-hot rows and round trip") {
  GraphHash h1 = std::min(Hash(1), Hash(2)), h2 = std::max(Hash(1), Hash(2));
  Vocabulary v({h1, h2});
  std::vector<Fingerprint> corpus{Fp("b", {h1}, 3), Fp("a", {})};
  EncodedCorpus e = EncodeCorpus(corpus, v);
  CHECK(e.sample_ids == std::vector<std::string>{"a", "b"});
  CHECK(e.labels[0] == std::nullopt);
  CHECK(e.labels[1] == 3);
  CHECK(e.matrix.Popcount(0) == 0);
  CHECK(e.matrix.Get(1, 0));
  CHECK_FALSE(e.matrix.Get(1, 1));
  CHECK(DecodeRow(e, 1, v) == std::set<GraphHash>{h1});
}

TEST_CASE("unknown hash names the sample and the hash") {
  Vocabulary v({Hash(1)});
  std::vector<Fingerprint> corpus{Fp("sample_x", {Hash(2)})};
  try {
    EncodeCorpus(corpus, v);
    FAIL("expected an exception");
  } catch (const Error& e) {
    std::string msg = e.what();
    CHECK(msg.find("sample_x") != std::string::npos);
    CHECK(msg.find(Hash(2).Hex()) != std::string::npos);
  }
}

TEST_CASE("duplicate ids are rejected") {
  Vocabulary v({Hash(1)});
  std::vector<Fingerprint> corpus{Fp("a", {}), Fp("a", {})};
  CHECK_THROWS_AS(EncodeCorpus(corpus, v), Error);
}

TEST_CASE("random encode/decode round trip and exact dimension") {
  std::mt19937_64 rng(4);
  std::vector<GraphHash> pool;
  for (int i = 1; i <= 40; ++i) pool.push_back(Hash(i));
  std::vector<Fingerprint> corpus;
  std::set<GraphHash> all;
  for (int s = 0; s < 30; ++s) {
    std::set<GraphHash> h;
    for (const GraphHash& g : pool) {
      if (rng() % 5 == 0) h.insert(g);
    }
    all.insert(h.begin(), h.end());
    corpus.push_back(Fp("s" + std::to_string(100 + s), h, 1 + s % 9));
  }
  Vocabulary v = BuildVocabulary(corpus);
  CHECK(v.dimension() == all.size());
  EncodedCorpus e = EncodeCorpus(corpus, v);
  for (std::size_t i = 0; i < e.size(); ++i) CHECK(DecodeRow(e, i, v) == corpus[i].hashes);

  testing::TempDir dir("enc");
  WriteEncodedCorpus(e, dir.path() / "m.bin");
  EncodedCorpus back = ReadEncodedCorpus(dir.path() / "m.bin");
  CHECK(back.matrix == e.matrix);
  CHECK(back.sample_ids == e.sample_ids);
  CHECK(back.labels == e.labels);
}

TEST_CASE("corrupt matrix files are rejected") {
  testing::TempDir dir("bad");
  Vocabulary v({Hash(1)});
  std::vector<Fingerprint> corpus{Fp("a", {Hash(1)}, 1)};
  WriteEncodedCorpus(EncodeCorpus(corpus, v), dir.path() / "m.bin");
  std::string bytes = ReadFile(dir.path() / "m.bin");
  WriteFile(dir.path() / "trail.bin", bytes + "x");
  CHECK_THROWS_AS(ReadEncodedCorpus(dir.path() / "trail.bin"), Error);
  WriteFile(dir.path() / "short.bin", bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(ReadEncodedCorpus(dir.path() / "short.bin"), Error);
  std::string magic = bytes;
  magic[0] = 'X';
  WriteFile(dir.path() / "magic.bin", magic);
  CHECK_THROWS_AS(ReadEncodedCorpus(dir.path() / "magic.bin"), Error);
  std::string padding = bytes;
  padding[padding.size() - 1] = '\x80';  // bit 63 of a one-column row
  WriteFile(dir.path() / "pad.bin", padding);
  CHECK_THROWS_AS(ReadEncodedCorpus(dir.path() / "pad.bin"), Error);
}

TEST_CASE("fingerprint files are deterministic and round trip") {
  ExtractionOptions options;
  FingerprintFile file;
  file.header = FingerprintHeader::For(options);
  for (const SyntheticSample& s : GenerateSyntheticSamples(1, 2)) {
    auto ins = ParseListing(s.listing, s.sample_id);
    Fingerprint fp = BuildFingerprint(s.sample_id, SegmentInstructions(ins));
    fp.label = s.label;
    file.fingerprints.push_back(std::move(fp));
  }
  file.fingerprints.push_back(Fp("zz_unlabeled", {}));
  std::string text = SerializeFingerprints(file);
  CHECK(SerializeFingerprints(file) == text);
  FingerprintFile back = ParseFingerprints(text);
  CHECK(back.header == file.header);
  CHECK(back.fingerprints == file.fingerprints);
  CHECK(text.find("\"label\":null") != std::string::npos);
}

TEST_CASE("extraction from a file matches in-memory extraction") {
  testing::TempDir dir("extract");
  auto samples = GenerateSyntheticSamples(1, 6);
  ExtractionOptions options;
  for (const SyntheticSample& s : samples) {
    WriteFile(dir.path() / "x.asm", s.listing);
    ParseDiagnostics diag;
    Fingerprint a = ExtractFingerprint(dir.path() / "x.asm", s.sample_id, options, &diag);
    auto ins = ParseListing(s.listing, s.sample_id);
    CHECK(a.hashes == BuildFingerprint(s.sample_id, SegmentInstructions(ins)).hashes);
    CHECK(diag.code_lines == ins.size());
  }
}

TEST_CASE("merge checks headers and ids") {
  ExtractionOptions options;
  FingerprintFile a, b, c;
  a.header = b.header = c.header = FingerprintHeader::For(options);
  a.fingerprints = {Fp("a", {Hash(1)})};
  b.fingerprints = {Fp("b", {Hash(2)})};
  FingerprintFile m = MergeFingerprints(b, a);
  REQUIRE(m.fingerprints.size() == 2);
  CHECK(m.fingerprints[0].sample_id == "a");
  CHECK_THROWS_AS(MergeFingerprints(a, a), Error);
  c.header.wl_iterations = 4;
  CHECK_THROWS_AS(MergeFingerprints(a, c), Error);
}

TEST_CASE("malformed fingerprint files are rejected") {
  CHECK_THROWS(ParseFingerprints(""));
  CHECK_THROWS(ParseFingerprints("{\"ddgf_fingerprints\":1}\n"));
  ExtractionOptions options;
  FingerprintFile f;
  f.header = FingerprintHeader::For(options);
  std::string header = SerializeFingerprints(f);
  CHECK_THROWS(ParseFingerprints(header + "{\"id\":\"a\",\"label\":1,\"hashes\":[\"zz\"]}\n"));
  CHECK_THROWS(ParseFingerprints(header + "{\"id\":\"a\",\"label\":12,\"hashes\":[]}\n"));
}

}  // TEST_SUITE

}  // namespace
}  // namespace ddgf
