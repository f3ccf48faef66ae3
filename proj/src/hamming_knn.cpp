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

#include "ddgf/hamming_knn.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ddgf/common.hpp"

namespace ddgf {

std::size_t Hamming(BitRow a, BitRow b) {
  if (a.size() != b.size()) throw std::invalid_argument("Hamming: dimension mismatch");
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += static_cast<std::size_t>(std::popcount(a[i] ^ b[i]));
  return total;
}

std::size_t Dot(BitRow a, BitRow b) {
  if (a.size() != b.size()) throw std::invalid_argument("Dot: dimension mismatch");
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) total += static_cast<std::size_t>(std::popcount(a[i] & b[i]));
  return total;
}

DistanceMatrix CrossDistances(const BitMatrix& a, const BitMatrix& b, DistanceMethod method,
                              unsigned jobs) {
  if (a.cols() != b.cols()) throw std::invalid_argument("CrossDistances: dimension mismatch");
  DistanceMatrix d;
  d.rows = a.rows();
  d.cols = b.rows();
  d.values.assign(d.rows * d.cols, 0);

  std::vector<std::size_t> pop_b;
  if (method == DistanceMethod::kInnerProduct) {
    pop_b.resize(b.rows());
    for (std::size_t j = 0; j < b.rows(); ++j) pop_b[j] = b.Popcount(j);
  }
  ParallelFor(a.rows(), jobs, [&](std::size_t i) {
    BitRow row = a.Row(i);
    std::uint32_t* out = d.values.data() + i * d.cols;
    if (method == DistanceMethod::kXorPopcount) {
      for (std::size_t j = 0; j < b.rows(); ++j) out[j] = static_cast<std::uint32_t>(Hamming(row, b.Row(j)));
    } else {
      std::size_t pop_a = a.Popcount(i);
      for (std::size_t j = 0; j < b.rows(); ++j) {
        out[j] = static_cast<std::uint32_t>(pop_a + pop_b[j] - 2 * Dot(row, b.Row(j)));
      }
    }
  });
  return d;
}

std::string DistancesCsv(const DistanceMatrix& d, std::span<const std::string> ids) {
  if (ids.size() != d.rows || d.rows != d.cols) {
    throw std::invalid_argument("DistancesCsv: expects a square matrix with one id per row");
  }
  std::ostringstream out;
  out << "id";
  for (const std::string& id : ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < d.rows; ++i) {
    out << ids[i];
    for (std::uint32_t v : d.Row(i)) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

// --- Split ---

void SeededShuffle(std::vector<std::size_t>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(UniformBelow(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

std::size_t TrainCount(std::size_t n, const SplitSpec& spec) {
  return static_cast<std::size_t>(static_cast<unsigned __int128>(n) * spec.train_numerator /
                                  spec.train_denominator);
}

Split SplitCorpus(std::span<const std::optional<ClassLabel>> labels, const SplitSpec& spec) {
  if (spec.train_denominator == 0 || spec.train_numerator == 0 ||
      spec.train_numerator >= spec.train_denominator) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> labeled;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) labeled.push_back(i);
  }
  if (labeled.size() < 2) throw ValidationError("split needs at least 2 labeled samples");

  Split split;
  if (!spec.stratified) {
    SeededShuffle(labeled, spec.seed);
    std::size_t n_train = TrainCount(labeled.size(), spec);
    split.train.assign(labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.assign(labeled.begin() + static_cast<std::ptrdiff_t>(n_train), labeled.end());
  } else {
    std::map<ClassLabel, std::vector<std::size_t>> by_class;
    for (std::size_t i : labeled) by_class[*labels[i]].push_back(i);
    for (auto& [cls, members] : by_class) {
      // Per-class seed keeps classes independent of each other's sizes.
      SeededShuffle(members, spec.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(cls)));
      std::size_t n_train = TrainCount(members.size(), spec);
      split.train.insert(split.train.end(), members.begin(),
                         members.begin() + static_cast<std::ptrdiff_t>(n_train));
      split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
                        members.end());
    }
  }
  if (split.train.empty() || split.test.empty()) {
    throw ValidationError("split leaves the train or test side empty");
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

// --- kNN ---

ClassLabel PredictFromDistances(std::span<const std::uint32_t> distances,
                                std::span<const ClassLabel> train_labels, std::size_t k) {
  if (distances.size() != train_labels.size()) {
    throw std::invalid_argument("PredictFromDistances: one distance per training row expected");
  }
  if (k == 0 || k > distances.size()) throw std::invalid_argument("k must be in 1..training size");

  if (distances.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("training set too large");
  }
  // Packing (distance, index) into one key makes the order total and the
  // selection a plain nth_element.
  std::vector<std::uint64_t> keys(distances.size());
  for (std::size_t i = 0; i < distances.size(); ++i) {
    keys[i] = (static_cast<std::uint64_t>(distances[i]) << 32) | static_cast<std::uint32_t>(i);
  }
  std::nth_element(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k - 1), keys.end());

  std::array<std::size_t, kNumClasses + 1> votes{};
  std::array<std::uint64_t, kNumClasses + 1> summed{};
  for (std::size_t n = 0; n < k; ++n) {
    std::size_t row = keys[n] & 0xffffffffu;
    ClassLabel c = train_labels[row];
    ++votes[static_cast<std::size_t>(c)];
    summed[static_cast<std::size_t>(c)] += distances[row];
  }
  ClassLabel best = 0;
  for (ClassLabel c = 1; c <= kNumClasses; ++c) {
    auto i = static_cast<std::size_t>(c);
    if (votes[i] == 0) continue;
    auto b = static_cast<std::size_t>(best);
    if (best == 0 || votes[i] > votes[b] || (votes[i] == votes[b] && summed[i] < summed[b])) {
      best = c;
    }
  }
  return best;
}

KnnModel::KnnModel(BitMatrix train, std::vector<ClassLabel> labels, std::size_t k)
    : train_(std::move(train)), labels_(std::move(labels)), k_(k) {
  if (labels_.size() != train_.rows()) throw std::invalid_argument("one label per training row expected");
  if (k_ == 0 || k_ > train_.rows()) {
    throw std::invalid_argument("k = " + std::to_string(k_) + " must be in 1.." +
                                std::to_string(train_.rows()));
  }
  for (ClassLabel c : labels_) {
    if (!IsValidClass(c)) throw std::invalid_argument("training label outside 1..9");
  }
}

ClassLabel KnnModel::Predict(BitRow query) const {
  if (query.size() != train_.words_per_row()) throw std::invalid_argument("query dimension mismatch");
  std::vector<std::uint32_t> distances(train_.rows());
  for (std::size_t j = 0; j < train_.rows(); ++j) {
    distances[j] = static_cast<std::uint32_t>(Hamming(query, train_.Row(j)));
  }
  return PredictFromDistances(distances, labels_, k_);
}

std::vector<ClassLabel> KnnModel::PredictAll(const BitMatrix& queries, unsigned jobs) const {
  if (queries.cols() != train_.cols()) throw std::invalid_argument("query dimension mismatch");
  std::vector<ClassLabel> out(queries.rows());
  ParallelFor(queries.rows(), jobs, [&](std::size_t i) { out[i] = Predict(queries.Row(i)); });
  return out;
}

ConfusionMatrix Evaluate(const KnnModel& model, const BitMatrix& test_rows,
                         std::span<const ClassLabel> test_labels, unsigned jobs) {
  if (test_rows.rows() == 0) throw Error("empty test set");
  if (test_labels.size() != test_rows.rows()) throw Error("one label per test row expected");
  for (ClassLabel c : test_labels) {
    if (!IsValidClass(c)) throw Error("test label " + std::to_string(c) + " outside 1..9");
  }
  std::vector<ClassLabel> predicted = model.PredictAll(test_rows, jobs);
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < predicted.size(); ++i) cm.Add(test_labels[i], predicted[i]);
  return cm;
}

}  // namespace ddgf
