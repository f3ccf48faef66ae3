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

#ifndef DDGF_EVAL_METRICS_HPP
#define DDGF_EVAL_METRICS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ddgf/labels.hpp"

namespace ddgf {

// Non-negative rational kept in lowest terms. A zero denominator marks a
// degenerate ratio whose value() is 0.
class Fraction {
 public:
  Fraction() = default;
  Fraction(std::uint64_t num, std::uint64_t den);

  std::uint64_t num() const { return num_; }
  std::uint64_t den() const { return den_; }
  bool degenerate() const { return den_ == 0; }
  double value() const { return den_ == 0 ? 0.0 : static_cast<double>(num_) / static_cast<double>(den_); }

  // Exact comparison by cross-multiplication; degenerate ratios equal only
  // each other.
  bool operator==(const Fraction& other) const;

 private:
  std::uint64_t num_ = 0;
  std::uint64_t den_ = 0;
};

// 2PR / (P + R) evaluated exactly.
Fraction HarmonicMean(const Fraction& p, const Fraction& r);

// Rows are true classes, columns predicted classes, both 1..kNumClasses.
class ConfusionMatrix {
 public:
  void Add(ClassLabel truth, ClassLabel predicted, std::uint64_t count = 1);

  std::uint64_t At(ClassLabel truth, ClassLabel predicted) const;
  std::uint64_t RowSum(ClassLabel truth) const;
  std::uint64_t ColSum(ClassLabel predicted) const;
  std::uint64_t Trace() const;
  std::uint64_t Total() const;

  // "true_label,1,...,9" header then one row per true class.
  std::string ToCsv() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> cells_{};
};

enum DegenerateFlag : unsigned {
  kNone = 0,
  kAccuracyDegenerate = 1,
  kPrecisionDegenerate = 2,
  kRecallDegenerate = 4,
  kSpecificityDegenerate = 8,
  kF1Degenerate = 16,
};

// One-vs-rest metrics for a single class.
struct ClassMetrics {
  ClassLabel class_id = 0;
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;
  Fraction accuracy, precision, recall, specificity, f1;
  unsigned degenerate = kNone;  // DegenerateFlag bits
};

std::vector<ClassMetrics> PerClassMetrics(const ConfusionMatrix& cm);

// trace / total. Throws Error on an empty matrix.
Fraction TotalAccuracy(const ConfusionMatrix& cm);

// F1 from already-rounded precision and recall, as printed in result tables.
double F1FromPrecisionRecall(double precision, double recall);

// Four decimals, the precision used in every CSV.
std::string FormatRatio(double value);

// class,accuracy,precision,recall,specificity,f1,tp,tn,fp,fn,degenerate
std::string MetricsCsv(const std::vector<ClassMetrics>& metrics);

struct PredictionRecord {
  std::string sample_id;
  ClassLabel truth = 0;
  ClassLabel predicted = 0;
};

// id,true_label,predicted_label
std::string PredictionsCsv(const std::vector<PredictionRecord>& records);
std::vector<PredictionRecord> ParsePredictionsCsv(std::string_view csv);
ConfusionMatrix ConfusionFromPredictions(const std::vector<PredictionRecord>& records);

}  // namespace ddgf

#endif  // DDGF_EVAL_METRICS_HPP
