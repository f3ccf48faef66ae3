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

#ifndef DDGF_SWEEP_HPP
#define DDGF_SWEEP_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ddgf/eval_metrics.hpp"
#include "ddgf/fingerprint_store.hpp"
#include "ddgf/hamming_knn.hpp"

namespace ddgf {

// Train/test views of an encoded corpus under one split.
struct SplitData {
  Split split;
  BitMatrix train_rows, test_rows;
  std::vector<ClassLabel> train_labels, test_labels;
  std::vector<std::string> test_ids;
};

SplitData ApplySplit(const EncodedCorpus& corpus, const SplitSpec& spec);

struct SweepRow {
  std::size_t k = 0;
  ConfusionMatrix confusion;
  Fraction total_accuracy;
  std::vector<ClassMetrics> per_class;
  std::vector<ClassLabel> predictions;  // aligned with SplitData::test_ids
};

struct SweepResult {
  SplitData data;
  std::vector<SweepRow> rows;
};

// Splits once, computes the test x train distance table once, then votes for
// every k. Equivalent to building a KnnModel per k.
SweepResult KSweep(const EncodedCorpus& corpus, const SplitSpec& spec,
                   std::span<const std::size_t> ks, unsigned jobs = 1);

// k,total_accuracy,correct,test_size
std::string SweepCsv(const SweepResult& result);
// k,class,accuracy,precision,recall,specificity,f1,tp,tn,fp,fn,degenerate
std::string SweepPerClassCsv(const SweepResult& result);

std::vector<PredictionRecord> PredictionRecords(const SweepResult& result, std::size_t row);

// "2:19" (inclusive range), "1,2,5" or "3". Throws ValidationError.
std::vector<std::size_t> ParseKList(const std::string& text);

}  // namespace ddgf

#endif  // DDGF_SWEEP_HPP
