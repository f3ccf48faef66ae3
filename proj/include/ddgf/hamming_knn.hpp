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

#ifndef DDGF_HAMMING_KNN_HPP
#define DDGF_HAMMING_KNN_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ddgf/bit_matrix.hpp"
#include "ddgf/eval_metrics.hpp"
#include "ddgf/labels.hpp"

namespace ddgf {

// Number of differing bits. Throws std::invalid_argument on length mismatch.
std::size_t Hamming(BitRow a, BitRow b);
// Number of common set bits, i.e. the inner product of two 0/1 vectors.
std::size_t Dot(BitRow a, BitRow b);

// Dense row-major n x m distance table.
struct DistanceMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint32_t> values;

  std::uint32_t At(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
  std::span<const std::uint32_t> Row(std::size_t i) const {
    return std::span<const std::uint32_t>(values).subspan(i * cols, cols);
  }
  bool operator==(const DistanceMatrix&) const = default;
};

enum class DistanceMethod {
  kXorPopcount,    // popcount(a ^ b)
  kInnerProduct,   // pop(a) + pop(b) - 2 * dot(a, b)
};

// D[i][j] = Hamming(a.Row(i), b.Row(j)). Rows are computed in parallel; the
// result does not depend on `jobs`.
DistanceMatrix CrossDistances(const BitMatrix& a, const BitMatrix& b,
                              DistanceMethod method = DistanceMethod::kXorPopcount,
                              unsigned jobs = 1);

inline DistanceMatrix PairwiseDistances(const BitMatrix& m,
                                        DistanceMethod method = DistanceMethod::kXorPopcount,
                                        unsigned jobs = 1) {
  return CrossDistances(m, m, method, jobs);
}

// Full matrix as CSV with a header row of sample ids and the id in column 0.
std::string DistancesCsv(const DistanceMatrix& d, std::span<const std::string> ids);

struct SplitSpec {
  std::uint64_t train_numerator = 3;
  std::uint64_t train_denominator = 4;
  std::uint64_t seed = 0;
  bool stratified = false;
};

struct Split {
  std::vector<std::size_t> train;  // ascending corpus indices
  std::vector<std::size_t> test;   // ascending corpus indices
};

// Number of training samples for n labeled samples: floor(n * num / den).
std::size_t TrainCount(std::size_t n, const SplitSpec& spec);

// Deterministic Fisher-Yates over labeled indices (unlabeled ones are
// excluded), then a prefix split; per class when stratified. Throws
// ValidationError for an invalid fraction or fewer than 2 labeled samples, and
// if either side would be empty.
Split SplitCorpus(std::span<const std::optional<ClassLabel>> labels, const SplitSpec& spec);

// Reproducible across platforms: std::mt19937_64 with an explicit bounded draw
// (std::shuffle and std::uniform_int_distribution are implementation-defined).
void SeededShuffle(std::vector<std::size_t>& items, std::uint64_t seed);

// Tie policy used by every prediction path:
//  - neighbors: the k smallest (distance, training row index) pairs;
//  - vote: highest count, then smallest summed neighbor distance, then
//    smallest class label.
inline constexpr const char* kTiePolicy =
    "neighbors=(distance,row_index);vote=(count desc,sum_distance asc,label asc)";

// Majority vote over the k nearest of `distances` (one entry per training row).
ClassLabel PredictFromDistances(std::span<const std::uint32_t> distances,
                                std::span<const ClassLabel> train_labels, std::size_t k);

class KnnModel {
 public:
  // Throws std::invalid_argument if k == 0, k > rows, or labels mismatch.
  KnnModel(BitMatrix train, std::vector<ClassLabel> labels, std::size_t k);

  ClassLabel Predict(BitRow query) const;
  std::vector<ClassLabel> PredictAll(const BitMatrix& queries, unsigned jobs = 1) const;

  std::size_t k() const { return k_; }
  const BitMatrix& train() const { return train_; }
  const std::vector<ClassLabel>& labels() const { return labels_; }
  const char* tie_policy() const { return kTiePolicy; }

 private:
  BitMatrix train_;
  std::vector<ClassLabel> labels_;
  std::size_t k_;
};

// Throws Error on an empty test set or a label outside 1..9.
ConfusionMatrix Evaluate(const KnnModel& model, const BitMatrix& test_rows,
                         std::span<const ClassLabel> test_labels, unsigned jobs = 1);

}  // namespace ddgf

#endif  // DDGF_HAMMING_KNN_HPP
