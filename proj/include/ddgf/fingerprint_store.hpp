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

#ifndef DDGF_FINGERPRINT_STORE_HPP
#define DDGF_FINGERPRINT_STORE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddgf/bit_matrix.hpp"
#include "ddgf/ddg_builder.hpp"
#include "ddgf/labels.hpp"
#include "ddgf/segmenter.hpp"
#include "ddgf/wl_hasher.hpp"

namespace ddgf {

// The "DDG fingerprint" of one program: the set of distinct WL hashes over
// the non-empty dependency graphs of its segments.
struct Fingerprint {
  std::string sample_id;
  std::set<GraphHash> hashes;
  std::optional<ClassLabel> label;

  bool operator==(const Fingerprint&) const = default;
};

// Everything that determines which hashes a listing produces.
struct ExtractionOptions {
  SegmenterOptions segmenter;
  InstructionFilter filter = DefaultInstructionFilter();
  int wl_iterations = kDefaultWlIterations;
};

Fingerprint BuildFingerprint(std::string_view sample_id, std::span<const Segment> segments,
                             const InstructionFilter& filter = DefaultInstructionFilter(),
                             int iterations = kDefaultWlIterations);

// parse -> segment -> graph -> hash for one listing file.
Fingerprint ExtractFingerprint(const std::filesystem::path& listing,
                               std::string_view sample_id,
                               const ExtractionOptions& options,
                               ParseDiagnostics* diagnostics = nullptr);

// Provenance header of a fingerprint file. Files merge only if headers match.
struct FingerprintHeader {
  std::string tool_version;
  int wl_iterations = kDefaultWlIterations;
  std::string wl_scheme;
  std::string digest;
  std::vector<std::string> terminators;
  std::vector<std::string> instruction_filter;
  bool split_at_function_start = true;

  static FingerprintHeader For(const ExtractionOptions& options);
  bool operator==(const FingerprintHeader&) const = default;
};

struct FingerprintFile {
  FingerprintHeader header;
  std::vector<Fingerprint> fingerprints;  // sorted by sample_id
};

// JSON lines: header object, then {"id","label","hashes"} per sample sorted by
// id with hashes sorted. Identical inputs give identical bytes.
std::string SerializeFingerprints(const FingerprintFile& file);
FingerprintFile ParseFingerprints(std::string_view jsonl);
void WriteFingerprints(const FingerprintFile& file, const std::filesystem::path& path);
FingerprintFile ReadFingerprints(const std::filesystem::path& path);

// Throws Error on header mismatch or a duplicated sample id.
FingerprintFile MergeFingerprints(const FingerprintFile& a, const FingerprintFile& b);

// Sorted union of all corpus hashes; column j of the encoding is hashes[j].
class Vocabulary {
 public:
  Vocabulary() = default;
  // Sorts and deduplicates.
  explicit Vocabulary(std::vector<GraphHash> hashes);

  std::size_t dimension() const { return hashes_.size(); }
  const std::vector<GraphHash>& hashes() const { return hashes_; }
  std::optional<std::size_t> IndexOf(const GraphHash& hash) const;

  // One hex hash per line.
  std::string Serialize() const;
  static Vocabulary Parse(std::string_view text);

  bool operator==(const Vocabulary&) const = default;

 private:
  std::vector<GraphHash> hashes_;
};

Vocabulary BuildVocabulary(std::span<const Fingerprint> corpus);

// One-hot rows, one per sample in sorted sample_id order.
struct EncodedCorpus {
  BitMatrix matrix;
  std::vector<std::string> sample_ids;
  std::vector<std::optional<ClassLabel>> labels;

  std::size_t size() const { return sample_ids.size(); }
};

// Throws Error naming the sample and hash if a hash is missing from `vocab`,
// or if a sample id repeats.
EncodedCorpus EncodeCorpus(std::span<const Fingerprint> corpus, const Vocabulary& vocab);

std::set<GraphHash> DecodeRow(const EncodedCorpus& encoded, std::size_t row,
                              const Vocabulary& vocab);

// Little-endian binary: "DDGFBITS", u32 version, u32 0, u64 rows, u64 cols,
// per row {u32 id length, id bytes, u8 label (0 = none)}, then the packed
// words row by row.
void WriteEncodedCorpus(const EncodedCorpus& encoded, const std::filesystem::path& path);
EncodedCorpus ReadEncodedCorpus(const std::filesystem::path& path);

}  // namespace ddgf

#endif  // DDGF_FINGERPRINT_STORE_HPP
