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

#include "ddgf/sweep.hpp"

#include <charconv>
#include <sstream>

#include "ddgf/common.hpp"

namespace ddgf {

SplitData ApplySplit(const EncodedCorpus& corpus, const SplitSpec& spec) {
  SplitData data;
  data.split = SplitCorpus(corpus.labels, spec);
  data.train_rows = corpus.matrix.SelectRows(data.split.train);
  data.test_rows = corpus.matrix.SelectRows(data.split.test);
  for (std::size_t i : data.split.train) data.train_labels.push_back(*corpus.labels[i]);
  for (std::size_t i : data.split.test) {
    data.test_labels.push_back(*corpus.labels[i]);
    data.test_ids.push_back(corpus.sample_ids[i]);
  }
  return data;
}

SweepResult KSweep(const EncodedCorpus& corpus, const SplitSpec& spec,
                   std::span<const std::size_t> ks, unsigned jobs) {
  if (ks.empty()) throw ValidationError("k list is empty");
  SweepResult result;
  result.data = ApplySplit(corpus, spec);
  const SplitData& data = result.data;
  for (std::size_t k : ks) {
    if (k == 0 || k > data.train_rows.rows()) {
      throw ValidationError("k = " + std::to_string(k) + " outside 1.." +
                            std::to_string(data.train_rows.rows()));
    }
  }

  DistanceMatrix distances =
      CrossDistances(data.test_rows, data.train_rows, DistanceMethod::kXorPopcount, jobs);
  result.rows.resize(ks.size());
  ParallelFor(ks.size(), jobs, [&](std::size_t r) {
    SweepRow& row = result.rows[r];
    row.k = ks[r];
    row.predictions.resize(data.test_rows.rows());
    for (std::size_t i = 0; i < data.test_rows.rows(); ++i) {
      row.predictions[i] = PredictFromDistances(distances.Row(i), data.train_labels, row.k);
      row.confusion.Add(data.test_labels[i], row.predictions[i]);
    }
    row.total_accuracy = TotalAccuracy(row.confusion);
    row.per_class = PerClassMetrics(row.confusion);
  });
  return result;
}

std::string SweepCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "k,total_accuracy,correct,test_size\n";
  for (const SweepRow& row : result.rows) {
    out << row.k << ',' << FormatRatio(row.total_accuracy.value()) << ','
        << row.confusion.Trace() << ',' << row.confusion.Total() << '\n';
  }
  return out.str();
}

std::string SweepPerClassCsv(const SweepResult& result) {
  std::ostringstream out;
  out << "k,class,accuracy,precision,recall,specificity,f1,tp,tn,fp,fn,degenerate\n";
  for (const SweepRow& row : result.rows) {
    std::string body = MetricsCsv(row.per_class);
    std::istringstream lines(body);
    std::string line;
    std::getline(lines, line);  // header
    while (std::getline(lines, line)) out << row.k << ',' << line << '\n';
  }
  return out.str();
}

std::vector<PredictionRecord> PredictionRecords(const SweepResult& result, std::size_t row) {
  const SweepRow& r = result.rows.at(row);
  std::vector<PredictionRecord> records;
  records.reserve(r.predictions.size());
  for (std::size_t i = 0; i < r.predictions.size(); ++i) {
    records.push_back({result.data.test_ids[i], result.data.test_labels[i], r.predictions[i]});
  }
  return records;
}

std::vector<std::size_t> ParseKList(const std::string& text) {
  auto parse = [&](std::string_view s) {
    std::size_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
      throw ValidationError("bad k list '" + text + "'");
    }
    return v;
  };
  std::vector<std::size_t> ks;
  std::size_t colon = text.find(':');
  if (colon != std::string::npos) {
    std::size_t lo = parse(std::string_view(text).substr(0, colon));
    std::size_t hi = parse(std::string_view(text).substr(colon + 1));
    if (lo > hi) throw ValidationError("bad k range '" + text + "'");
    for (std::size_t k = lo; k <= hi; ++k) ks.push_back(k);
    return ks;
  }
  std::string_view rest(text);
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    ks.push_back(parse(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (ks.empty()) throw ValidationError("empty k list");
  return ks;
}

}  // namespace ddgf
