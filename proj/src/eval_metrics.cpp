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

#include "ddgf/eval_metrics.hpp"

#include <charconv>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "ddgf/common.hpp"

namespace ddgf {
namespace {

using u128 = unsigned __int128;

void CheckClass(ClassLabel c, const char* what) {
  if (!IsValidClass(c)) {
    throw Error(std::string(what) + " label " + std::to_string(c) + " outside 1.." +
                std::to_string(kNumClasses));
  }
}

std::size_t Idx(ClassLabel c) { return static_cast<std::size_t>(c - 1); }

}  // namespace

Fraction::Fraction(std::uint64_t num, std::uint64_t den) : num_(num), den_(den) {
  if (den_ != 0) {
    std::uint64_t g = std::gcd(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
}

bool Fraction::operator==(const Fraction& other) const {
  if (degenerate() || other.degenerate()) return degenerate() && other.degenerate();
  return static_cast<u128>(num_) * other.den_ == static_cast<u128>(other.num_) * den_;
}

Fraction HarmonicMean(const Fraction& p, const Fraction& r) {
  if (p.degenerate() || r.degenerate()) return Fraction(0, 0);
  // 2 (a/b)(c/d) / (a/b + c/d) = 2ac / (ad + cb)
  u128 num = static_cast<u128>(2) * p.num() * r.num();
  u128 den = static_cast<u128>(p.num()) * r.den() + static_cast<u128>(r.num()) * p.den();
  if (den == 0) return Fraction(0, 0);
  u128 a = num, b = den;
  while (b != 0) {
    u128 t = a % b;
    a = b;
    b = t;
  }
  num /= a;
  den /= a;
  if ((num >> 64) != 0 || (den >> 64) != 0) throw Error("fraction overflow");
  return Fraction(static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den));
}

void ConfusionMatrix::Add(ClassLabel truth, ClassLabel predicted, std::uint64_t count) {
  CheckClass(truth, "true");
  CheckClass(predicted, "predicted");
  cells_[Idx(truth)][Idx(predicted)] += count;
}

std::uint64_t ConfusionMatrix::At(ClassLabel truth, ClassLabel predicted) const {
  CheckClass(truth, "true");
  CheckClass(predicted, "predicted");
  return cells_[Idx(truth)][Idx(predicted)];
}

std::uint64_t ConfusionMatrix::RowSum(ClassLabel truth) const {
  CheckClass(truth, "true");
  const auto& row = cells_[Idx(truth)];
  return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::ColSum(ClassLabel predicted) const {
  CheckClass(predicted, "predicted");
  std::uint64_t total = 0;
  for (const auto& row : cells_) total += row[Idx(predicted)];
  return total;
}

std::uint64_t ConfusionMatrix::Trace() const {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < kNumClasses; ++i) total += cells_[i][i];
  return total;
}

std::uint64_t ConfusionMatrix::Total() const {
  std::uint64_t total = 0;
  for (const auto& row : cells_) total += std::accumulate(row.begin(), row.end(), std::uint64_t{0});
  return total;
}

std::string ConfusionMatrix::ToCsv() const {
  std::ostringstream out;
  out << "true_label";
  for (int c = 1; c <= kNumClasses; ++c) out << ',' << c;
  out << '\n';
  for (int t = 1; t <= kNumClasses; ++t) {
    out << t;
    for (int p = 1; p <= kNumClasses; ++p) out << ',' << cells_[Idx(t)][Idx(p)];
    out << '\n';
  }
  return out.str();
}

std::vector<ClassMetrics> PerClassMetrics(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.Total();
  std::vector<ClassMetrics> out;
  out.reserve(kNumClasses);
  for (ClassLabel c = 1; c <= kNumClasses; ++c) {
    ClassMetrics m;
    m.class_id = c;
    m.tp = cm.At(c, c);
    m.fn = cm.RowSum(c) - m.tp;
    m.fp = cm.ColSum(c) - m.tp;
    m.tn = total - m.tp - m.fp - m.fn;

    m.accuracy = Fraction(m.tp + m.tn, m.tp + m.tn + m.fp + m.fn);
    m.precision = Fraction(m.tp, m.tp + m.fp);
    m.recall = Fraction(m.tp, m.tp + m.fn);
    m.specificity = Fraction(m.tn, m.fp + m.tn);
    m.f1 = Fraction(2 * m.tp, 2 * m.tp + m.fp + m.fn);

    if (m.accuracy.degenerate()) m.degenerate |= kAccuracyDegenerate;
    if (m.precision.degenerate()) m.degenerate |= kPrecisionDegenerate;
    if (m.recall.degenerate()) m.degenerate |= kRecallDegenerate;
    if (m.specificity.degenerate()) m.degenerate |= kSpecificityDegenerate;
    if (m.f1.degenerate()) m.degenerate |= kF1Degenerate;
    out.push_back(m);
  }
  return out;
}

Fraction TotalAccuracy(const ConfusionMatrix& cm) {
  if (cm.Total() == 0) throw Error("total accuracy of an empty confusion matrix");
  return Fraction(cm.Trace(), cm.Total());
}

double F1FromPrecisionRecall(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

std::string FormatRatio(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", value);
  return buf;
}

std::string MetricsCsv(const std::vector<ClassMetrics>& metrics) {
  std::ostringstream out;
  out << "class,accuracy,precision,recall,specificity,f1,tp,tn,fp,fn,degenerate\n";
  for (const ClassMetrics& m : metrics) {
    out << m.class_id << ',' << FormatRatio(m.accuracy.value()) << ','
        << FormatRatio(m.precision.value()) << ',' << FormatRatio(m.recall.value()) << ','
        << FormatRatio(m.specificity.value()) << ',' << FormatRatio(m.f1.value()) << ','
        << m.tp << ',' << m.tn << ',' << m.fp << ',' << m.fn << ',' << m.degenerate << '\n';
  }
  return out.str();
}

std::string PredictionsCsv(const std::vector<PredictionRecord>& records) {
  std::ostringstream out;
  out << "id,true_label,predicted_label\n";
  for (const PredictionRecord& r : records) {
    out << r.sample_id << ',' << r.truth << ',' << r.predicted << '\n';
  }
  return out.str();
}

std::vector<PredictionRecord> ParsePredictionsCsv(std::string_view csv) {
  std::vector<PredictionRecord> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto parse_int = [&](std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ValidationError("predictions line " + std::to_string(line_no) + ": bad label '" +
                            std::string(s) + "'");
    }
    return v;
  };
  while (pos < csv.size()) {
    std::size_t eol = csv.find('\n', pos);
    if (eol == std::string_view::npos) eol = csv.size();
    std::string_view line = csv.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw ValidationError("predictions line " + std::to_string(line_no) +
                            ": expected id,true_label,predicted_label");
    }
    PredictionRecord r;
    r.sample_id = std::string(line.substr(0, c1));
    r.truth = parse_int(line.substr(c1 + 1, c2 - c1 - 1));
    r.predicted = parse_int(line.substr(c2 + 1));
    records.push_back(std::move(r));
  }
  return records;
}

ConfusionMatrix ConfusionFromPredictions(const std::vector<PredictionRecord>& records) {
  ConfusionMatrix cm;
  for (const PredictionRecord& r : records) cm.Add(r.truth, r.predicted);
  return cm;
}

}  // namespace ddgf
