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

#ifndef DDGF_SYNTHETIC_CORPUS_HPP
#define DDGF_SYNTHETIC_CORPUS_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ddgf/labels.hpp"

namespace ddgf {

// Desk-scale stand-in for the Kaggle corpus: nine families of IDA-style
// listings. Each family owns four data-movement motifs (a chain, a fan-out, a
// fan-in and a cycle, sized by family) which its samples mostly contain. All
// samples also draw from a shared pool of noise motifs, occasionally borrow a
// motif from another family, and carry non-mov filler, labels, alignment and
// data lines.
struct SyntheticSample {
  std::string sample_id;
  ClassLabel label = 0;
  std::string listing;
};

// n_per_class * 9 samples sorted by id. Throws ValidationError if
// n_per_class == 0. Output depends only on the arguments.
std::vector<SyntheticSample> GenerateSyntheticSamples(std::size_t n_per_class, std::uint64_t seed);

// Writes <id>.asm per sample and trainLabels.csv into `dir` (created if
// missing). Returns the label CSV path.
std::filesystem::path WriteSyntheticCorpus(const std::filesystem::path& dir,
                                           std::size_t n_per_class, std::uint64_t seed);

}  // namespace ddgf

#endif  // DDGF_SYNTHETIC_CORPUS_HPP
