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

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "ddgf/common.hpp"
#include "ddgf/labels.hpp"
#include "ddgf/pipeline.hpp"
#include "ddgf/synthetic_corpus.hpp"
#include "doctest.h"
#include "json.hpp"
#include "testing.hpp"

namespace ddgf {
namespace {

namespace fs = std::filesystem;

const fs::path kFixture = fs::path(DDGF_SOURCE_DIR) / "fixtures/synthetic";

int Cli(const std::string& args) {
  std::string cmd = std::string(DDGF_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

PipelineConfig FixtureConfig(const fs::path& out) {
  PipelineConfig cfg;
  cfg.input_dir = kFixture;
  cfg.labels_path = kFixture / "trainLabels.csv";
  cfg.output_dir = out;
  cfg.ks = {1, 2, 3};
  return cfg;
}

std::vector<bool> CachedFlags(const RunReport& r) {
  std::vector<bool> out;
  for (const StageReport& s : r.stages) out.push_back(s.cached);
  return out;
}

nlohmann::json ManifestWithoutTimings(const fs::path& path) {
  nlohmann::json j = nlohmann::json::parse(ReadFile(path));
  for (auto& stage : j["stages"]) stage.erase("seconds");
  for (auto& stage : j["stages"]) stage.erase("status");
  return j;
}

TEST_SUITE("labels") {

TEST_CASE("parses the label csv") {
  LabelMap m = ParseLabels("\"Id\",\"Class\"\n\"abc\",3\ndef,9\n");
  CHECK(m.size() == 2);
  CHECK(m.at("abc") == 3);
  CHECK(m.at("def") == 9);
  CHECK(ParseLabels("").empty());
  CHECK(FormatLabel(std::nullopt) == "none");
  CHECK(FormatLabel(4) == "4");
}

TEST_CASE("rejects bad rows with the line number") {
  try {
    ParseLabels("Id,Class\na,1\nb,10\n");
    FAIL("expected an exception");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("3") != std::string::npos);
  }
  CHECK_THROWS_AS(ParseLabels("Id,Class\na\n"), ValidationError);
  CHECK_THROWS_AS(ParseLabels("Id,Class\na,1\na,2\n"), ValidationError);
  CHECK_THROWS_AS(ReadLabels("/nonexistent/labels.csv"), ValidationError);
}

}  // TEST_SUITE

TEST_SUITE("synthetic_corpus") {

TEST_CASE("generation is seeded and sized") {
  auto a = GenerateSyntheticSamples(5, 42);
  auto b = GenerateSyntheticSamples(5, 42);
  REQUIRE(a.size() == 45);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].sample_id == b[i].sample_id);
    CHECK(a[i].listing == b[i].listing);
  }
  CHECK(GenerateSyntheticSamples(5, 43)[0].listing != a[0].listing);
  std::map<ClassLabel, int> per_class;
  for (const auto& s : a) per_class[s.label]++;
  CHECK(per_class.size() == 9);
  for (const auto& [c, n] : per_class) CHECK(n == 5);
  CHECK_THROWS_AS(GenerateSyntheticSamples(0, 1), ValidationError);
}

TEST_CASE("written corpus has one file per sample") {
  testing::TempDir dir("gen");
  fs::path labels = WriteSyntheticCorpus(dir.path(), 5, 42);
  CHECK(FindListings(dir.path()).size() == 45);
  CHECK(ReadLabels(labels).size() == 45);
}

TEST_CASE("families differ in fingerprint space") {
  auto samples = GenerateSyntheticSamples(6, 5);
  ExtractionOptions options;
  std::vector<Fingerprint> fps;
  for (const auto& s : samples) {
    auto ins = ParseListing(s.listing, s.sample_id);
    Fingerprint fp = BuildFingerprint(s.sample_id, SegmentInstructions(ins));
    fp.label = s.label;
    fps.push_back(fp);
  }
  Vocabulary v = BuildVocabulary(fps);
  EncodedCorpus e = EncodeCorpus(fps, v);
  for (ClassLabel a = 1; a <= kNumClasses; ++a) {
    for (ClassLabel b = a + 1; b <= kNumClasses; ++b) {
      std::vector<std::size_t> d;
      for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = 0; j < e.size(); ++j) {
          if (e.labels[i] == a && e.labels[j] == b) d.push_back(Hamming(e.matrix.Row(i), e.matrix.Row(j)));
        }
      }
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2), d.end());
      CHECK(d[d.size() / 2] > 0);
    }
  }
}

TEST_CASE("bundled fixture matches the generator") {
  testing::TempDir dir("regen");
  WriteSyntheticCorpus(dir.path(), 4, 2026);
  auto bundled = FindListings(kFixture);
  auto fresh = FindListings(dir.path());
  REQUIRE(bundled.size() == fresh.size());
  for (std::size_t i = 0; i < bundled.size(); ++i) {
    CHECK(bundled[i].sample_id == fresh[i].sample_id);
    CHECK(ReadFile(bundled[i].path) == ReadFile(fresh[i].path));
  }
  CHECK(ReadFile(kFixture / "trainLabels.csv") == ReadFile(dir.path() / "trainLabels.csv"));
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("bundled fixture runs end to end, then fully cached") {
  testing::TempDir out("run");
  auto start = std::chrono::steady_clock::now();
  RunReport first = RunPipeline(FixtureConfig(out.path()));
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  CHECK(seconds < 10.0);
  CHECK(first.classes == 9);
  CHECK(first.samples == 36);
  CHECK(first.stages.size() == 7);
  for (bool cached : CachedFlags(first)) CHECK_FALSE(cached);
  auto manifest = nlohmann::json::parse(ReadFile(first.manifest_path));
  CHECK(manifest["corpus"]["classes"] == 9);
  CHECK(manifest["corpus"]["vocabulary_dimension"] == first.vocabulary_dimension);
  for (const char* f : {"term_freq.csv", "fingerprints.jsonl", "matrix.bin", "VOCAB.txt", "PRED.csv", "CM.csv",
                        "METRICS.csv", "SWEEP.csv", "SWEEP_per_class.csv", "segments"}) {
    CHECK_MESSAGE(fs::exists(out.path() / f), f);
  }

  std::string pred = ReadFile(out.path() / "PRED.csv");
  auto before = ManifestWithoutTimings(first.manifest_path);
  RunReport second = RunPipeline(FixtureConfig(out.path()));
  for (bool cached : CachedFlags(second)) CHECK(cached);
  CHECK(ReadFile(out.path() / "PRED.csv") == pred);
  CHECK(ManifestWithoutTimings(second.manifest_path) == before);
}

TEST_CASE("config changes invalidate the right stages") {
  testing::TempDir out("inval");
  PipelineConfig cfg = FixtureConfig(out.path());
  RunPipeline(cfg);
  // freq, segment, fingerprint, encode, knn, metrics, sweep
  cfg.k = 3;
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, true, true, true, false, false, true});
  cfg.seed = 9;
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, true, true, true, false, false, false});
  cfg.wl_iterations = 2;
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, true, false, false, false, false, false});
  cfg.split_at_function_start = false;
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, false, false, false, false, false, false});
  cfg.jobs = 3;
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, true, true, true, true, true, true});
  fs::remove(out.path() / "PRED.csv");
  // knn reruns; its key is unchanged, so metrics stays cached.
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{true, true, true, true, false, true, true});
}

TEST_CASE("input edits invalidate extraction") {
  testing::TempDir dir("edit");
  fs::path labels = WriteSyntheticCorpus(dir.path() / "in", 2, 3);
  PipelineConfig cfg;
  cfg.input_dir = dir.path() / "in";
  cfg.labels_path = labels;
  cfg.output_dir = dir.path() / "out";
  cfg.ks = {1};
  cfg.k = 1;
  RunPipeline(cfg);
  auto first = FindListings(cfg.input_dir).front();
  WriteFile(first.path, ReadFile(first.path) + ".text:00409000 8B C3 mov eax, ebx\n");
  CHECK(CachedFlags(RunPipeline(cfg)) == std::vector<bool>{false, false, false, false, false, false, false});
}

TEST_CASE("parallel and serial runs agree") {
  testing::TempDir a("serial"), b("parallel");
  PipelineConfig cfg = FixtureConfig(a.path());
  RunPipeline(cfg);
  cfg.output_dir = b.path();
  cfg.jobs = 4;
  RunPipeline(cfg);
  for (const char* f : {"fingerprints.jsonl", "VOCAB.txt", "PRED.csv", "METRICS.csv", "SWEEP.csv"}) {
    CHECK_MESSAGE(ReadFile(a.path() / f) == ReadFile(b.path() / f), f);
  }
}

TEST_CASE("validation errors come before any work") {
  testing::TempDir out("val");
  PipelineConfig cfg = FixtureConfig(out.path() / "o");
  cfg.labels_path = out.path() / "missing.csv";
  CHECK_THROWS_AS(RunPipeline(cfg), ValidationError);
  CHECK_FALSE(fs::exists(out.path() / "o"));
  cfg = FixtureConfig(out.path() / "o");
  cfg.train_numerator = 4;
  CHECK_THROWS_AS(RunPipeline(cfg), ValidationError);
  cfg = FixtureConfig(out.path() / "o");
  cfg.ks = {};
  CHECK_THROWS_AS(RunPipeline(cfg), ValidationError);
  cfg = FixtureConfig(out.path() / "o");
  cfg.input_dir = out.path() / "nope";
  CHECK_THROWS_AS(RunPipeline(cfg), ValidationError);
  CHECK_FALSE(fs::exists(out.path() / "o"));
}

TEST_CASE("stage failures name the stage") {
  testing::TempDir dir("fail");
  fs::path labels = WriteSyntheticCorpus(dir.path() / "in", 1, 3);
  WriteFile(labels, "Id,Class\n");  // no labeled samples: the split fails
  PipelineConfig cfg;
  cfg.input_dir = dir.path() / "in";
  cfg.labels_path = labels;
  cfg.output_dir = dir.path() / "out";
  try {
    RunPipeline(cfg);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("knn") != std::string::npos);
  }
}

TEST_CASE("unreadable sample is named") {
  testing::TempDir dir("unread");
  WriteSyntheticCorpus(dir.path(), 1, 3);
  fs::create_directory(dir.path() / "broken.asm");  // a directory is skipped
  std::vector<ListingFile> listings = FindListings(dir.path());
  listings.push_back({"ghost", dir.path() / "ghost.asm"});
  try {
    ExtractCorpus(listings, ExtractionOptions{}, {}, 1);
    FAIL("expected an exception");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  testing::TempDir dir("exit");
  std::string out = dir.path().string();
  CHECK(Cli("--help") == 0);
  CHECK(Cli("") == 1);
  CHECK(Cli("bogus") == 1);
  CHECK(Cli("knn --matrix " + out + "/none.bin --out " + out + "/p.csv") == 1);
  CHECK(Cli("run --input " + kFixture.string() + " --labels " + out + "/none.csv --out " + out + "/o") == 1);
  CHECK(Cli("gen-synthetic --n 0 --out " + out + "/g") == 1);
  WriteFile(dir.path() / "garbage.bin", "not a matrix");
  CHECK(Cli("distances --matrix " + out + "/garbage.bin --out " + out + "/d.csv") == 2);
  CHECK(Cli("--seed 4 gen-synthetic --n 1 --out " + out + "/g") == 0);
  CHECK(Cli("fingerprint --input " + out + "/g --labels " + out + "/g/trainLabels.csv --out " + out + "/fp.jsonl") ==
        0);
  CHECK(Cli("encode --fp " + out + "/fp.jsonl --out " + out + "/m.bin --vocab " + out + "/v.txt") == 0);
  CHECK(Cli("knn --matrix " + out + "/m.bin --k 20 --out " + out + "/p.csv") == 1);
  CHECK(Cli("knn --matrix " + out + "/m.bin --k 1 --out " + out + "/p.csv --cm " + out + "/cm.csv --jobs 2") == 0);
  CHECK(Cli("metrics --pred " + out + "/p.csv --out " + out + "/met.csv") == 0);
  CHECK(Cli("sweep --matrix " + out + "/m.bin --ks 1:3 --out " + out + "/sw.csv") == 0);
  CHECK(Cli("distances --matrix " + out + "/m.bin --out " + out + "/d.csv --method dot") == 0);
  CHECK(Cli("freq --input " + out + "/g --out " + out + "/f.csv") == 0);
  CHECK(Cli("segment --input " + out + "/g --out " + out + "/seg") == 0);
  auto listing = FindListings(dir.path() / "g").front();
  CHECK(Cli("graph --input " + out + "/g --sample " + listing.sample_id + " --segment 0") == 0);
  CHECK(Cli("graph --input " + out + "/g --sample " + listing.sample_id + " --segment 100000") == 1);
}

TEST_CASE("config file plus flag overrides") {
  testing::TempDir dir("cfg");
  WriteFile(dir.path() / "run.toml",
            "# pipeline config\n"
            "input_dir = \"" + kFixture.string() + "\"\n"
            "labels = \"" + (kFixture / "trainLabels.csv").string() + "\"\n"
            "output_dir = \"out\"\n"
            "k = 1\n"
            "ks = \"1:2\"\n"
            "seed = 3\n"
            "instruction_filter = [\"mov\", \"movzx\"]\n");
  CHECK(Cli("run --config " + (dir.path() / "run.toml").string() + " --k 2") == 0);
  auto manifest = nlohmann::json::parse(ReadFile(dir.path() / "out/manifest.json"));
  CHECK(manifest["config"]["k"] == 2);
  CHECK(manifest["config"]["seed"] == 3);
  CHECK(manifest["config"]["ks"] == nlohmann::json::array({1, 2}));
  CHECK(manifest["config"]["instruction_filter"] == nlohmann::json::array({"mov", "movzx"}));
  CHECK(Cli("--seed 5 run --config " + (dir.path() / "run.toml").string()) == 0);
  manifest = nlohmann::json::parse(ReadFile(dir.path() / "out/manifest.json"));
  CHECK(manifest["config"]["seed"] == 5);
  WriteFile(dir.path() / "bad.toml", "unknown_key = 1\n");
  CHECK(Cli("run --config " + (dir.path() / "bad.toml").string()) == 1);
}

}  // TEST_SUITE

}  // namespace
}  // namespace ddgf
