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

#ifndef DDGF_PIPELINE_HPP
#define DDGF_PIPELINE_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ddgf/fingerprint_store.hpp"
#include "ddgf/hamming_knn.hpp"
#include "ddgf/listing_parser.hpp"

namespace ddgf {

struct PipelineConfig {
  std::filesystem::path input_dir;
  std::filesystem::path labels_path;
  std::filesystem::path terminators_path;  // empty: built-in set
  std::filesystem::path dict_path;         // empty: built-in opcode set
  std::vector<std::string> instruction_filter{"mov"};
  int wl_iterations = kDefaultWlIterations;
  bool split_at_function_start = true;
  std::uint64_t seed = 0;
  std::uint64_t train_numerator = 3;
  std::uint64_t train_denominator = 4;
  bool stratified = false;
  std::size_t k = 2;                  // predictions, confusion matrix, metrics
  std::vector<std::size_t> ks{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19};
  std::filesystem::path output_dir;
  unsigned jobs = 1;  // not part of any cache key
};

// Throws ValidationError if a path does not resolve or a value is out of range.
void ValidateConfig(const PipelineConfig& cfg);

// Options derived from the config (loads terminator and dictionary files).
ExtractionOptions ExtractionOptionsFor(const PipelineConfig& cfg);
SplitSpec SplitSpecFor(const PipelineConfig& cfg);

// `<id>.asm` files directly under `dir`, sorted by id (the file stem).
struct ListingFile {
  std::string sample_id;
  std::filesystem::path path;
};
std::vector<ListingFile> FindListings(const std::filesystem::path& dir);

// Fingerprints every listing with per-sample parallelism; result sorted by id.
// Failures are rethrown as Error naming the sample.
std::vector<Fingerprint> ExtractCorpus(const std::vector<ListingFile>& listings,
                                       const ExtractionOptions& options, const LabelMap& labels,
                                       unsigned jobs, ParseDiagnostics* diagnostics = nullptr);

TermDictionary CountCorpusTerms(const std::vector<ListingFile>& listings, TermDictionary dict,
                                unsigned jobs);

struct StageReport {
  std::string name;
  bool cached = false;
  double seconds = 0.0;
};

struct RunReport {
  std::vector<StageReport> stages;
  std::filesystem::path manifest_path;
  std::size_t samples = 0;
  std::size_t vocabulary_dimension = 0;
  std::size_t classes = 0;
  double total_accuracy = 0.0;
};

// freq -> segment -> fingerprint -> encode -> knn -> metrics -> sweep. A stage
// whose key (its config subset, input digests and upstream keys) matches the
// stored key and whose outputs exist is reported as cached and not rerun.
// Writes manifest.json into the output directory.
RunReport RunPipeline(const PipelineConfig& cfg);

}  // namespace ddgf

#endif  // DDGF_PIPELINE_HPP
