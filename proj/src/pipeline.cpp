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

#include "ddgf/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <set>

#include "ddgf/common.hpp"
#include "ddgf/digest.hpp"
#include "ddgf/sweep.hpp"
#include "json.hpp"

namespace ddgf {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

Json ConfigJson(const PipelineConfig& cfg) {
  Json j;
  j["input_dir"] = cfg.input_dir.string();
  j["labels"] = cfg.labels_path.string();
  j["terminators"] = cfg.terminators_path.string();
  j["dict"] = cfg.dict_path.string();
  j["instruction_filter"] = cfg.instruction_filter;
  j["wl_iterations"] = cfg.wl_iterations;
  j["split_at_function_start"] = cfg.split_at_function_start;
  j["seed"] = cfg.seed;
  j["train_fraction"] = std::to_string(cfg.train_numerator) + "/" + std::to_string(cfg.train_denominator);
  j["stratified"] = cfg.stratified;
  j["k"] = cfg.k;
  j["ks"] = cfg.ks;
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

std::string Key(const Json& parts) { return TextDigestHex(parts.dump()); }

// Runs a stage body unless the stored key matches and every output exists.
// Stage stats are persisted next to the key so cached runs report the same
// manifest contents.
class StageRunner {
 public:
  explicit StageRunner(const fs::path& out_dir) : cache_dir_(out_dir / ".ddgf_cache") {
    fs::create_directories(cache_dir_);
  }

  template <typename Body>
  Json Run(const std::string& name, const std::string& key, const std::vector<fs::path>& outputs,
           Body&& body) {
    auto started = std::chrono::steady_clock::now();
    fs::path stamp = cache_dir_ / (name + ".json");
    Json stats;
    bool cached = false;
    if (fs::exists(stamp) &&
        std::all_of(outputs.begin(), outputs.end(), [](const fs::path& p) { return fs::exists(p); })) {
      try {
        Json stored = Json::parse(ReadFile(stamp));
        if (stored.at("key") == key) {
          stats = stored.at("stats");
          cached = true;
        }
      } catch (const Json::exception&) {
        cached = false;
      }
    }
    if (!cached) {
      fs::remove(stamp);
      try {
        stats = body();
      } catch (const ValidationError& e) {
        throw ValidationError("stage " + name + ": " + e.what());
      } catch (const std::exception& e) {
        throw Error("stage " + name + ": " + e.what());
      }
      Json stored;
      stored["key"] = key;
      stored["stats"] = stats;
      WriteFile(stamp, stored.dump(2) + "\n");
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    reports_.push_back({name, cached, seconds});
    keys_.push_back(key);
    return stats;
  }

  const std::vector<StageReport>& reports() const { return reports_; }
  const std::vector<std::string>& keys() const { return keys_; }

 private:
  fs::path cache_dir_;
  std::vector<StageReport> reports_;
  std::vector<std::string> keys_;
};

}  // namespace

void ValidateConfig(const PipelineConfig& cfg) {
  if (cfg.input_dir.empty() || !fs::is_directory(cfg.input_dir)) {
    throw ValidationError("input directory not found: " + cfg.input_dir.string());
  }
  if (cfg.labels_path.empty() || !fs::is_regular_file(cfg.labels_path)) {
    throw ValidationError("labels file not found: " + cfg.labels_path.string());
  }
  if (!cfg.terminators_path.empty() && !fs::is_regular_file(cfg.terminators_path)) {
    throw ValidationError("terminator file not found: " + cfg.terminators_path.string());
  }
  if (!cfg.dict_path.empty() && !fs::is_regular_file(cfg.dict_path)) {
    throw ValidationError("dictionary file not found: " + cfg.dict_path.string());
  }
  if (cfg.output_dir.empty()) throw ValidationError("output directory not set");
  if (cfg.instruction_filter.empty()) throw ValidationError("instruction filter is empty");
  if (cfg.wl_iterations < 1) throw ValidationError("WL iterations must be >= 1");
  if (cfg.train_denominator == 0 || cfg.train_numerator == 0 ||
      cfg.train_numerator >= cfg.train_denominator) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  if (cfg.k == 0) throw ValidationError("k must be >= 1");
  if (cfg.ks.empty() || std::find(cfg.ks.begin(), cfg.ks.end(), 0u) != cfg.ks.end()) {
    throw ValidationError("k list must be non-empty and positive");
  }
}

ExtractionOptions ExtractionOptionsFor(const PipelineConfig& cfg) {
  ExtractionOptions options;
  if (!cfg.terminators_path.empty()) {
    options.segmenter.terminators = TerminatorSet::FromFile(cfg.terminators_path);
  }
  options.segmenter.split_at_function_start = cfg.split_at_function_start;
  options.filter = InstructionFilter(cfg.instruction_filter.begin(), cfg.instruction_filter.end());
  options.wl_iterations = cfg.wl_iterations;
  return options;
}

SplitSpec SplitSpecFor(const PipelineConfig& cfg) {
  return SplitSpec{cfg.train_numerator, cfg.train_denominator, cfg.seed, cfg.stratified};
}

std::vector<ListingFile> FindListings(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("input directory not found: " + dir.string());
  std::vector<ListingFile> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".asm") {
      files.push_back({entry.path().stem().string(), entry.path()});
    }
  }
  std::sort(files.begin(), files.end(),
            [](const ListingFile& a, const ListingFile& b) { return a.sample_id < b.sample_id; });
  return files;
}

std::vector<Fingerprint> ExtractCorpus(const std::vector<ListingFile>& listings,
                                       const ExtractionOptions& options, const LabelMap& labels,
                                       unsigned jobs, ParseDiagnostics* diagnostics) {
  std::vector<Fingerprint> out(listings.size());
  std::vector<ParseDiagnostics> diags(listings.size());
  ParallelFor(listings.size(), jobs, [&](std::size_t i) {
    const ListingFile& file = listings[i];
    try {
      out[i] = ExtractFingerprint(file.path, file.sample_id, options, &diags[i]);
    } catch (const std::exception& e) {
      throw Error("sample " + file.sample_id + ": " + e.what());
    }
    auto it = labels.find(file.sample_id);
    if (it != labels.end()) out[i].label = it->second;
  });
  if (diagnostics) {
    for (const ParseDiagnostics& d : diags) *diagnostics += d;
  }
  return out;
}

TermDictionary CountCorpusTerms(const std::vector<ListingFile>& listings, TermDictionary dict,
                                unsigned jobs) {
  std::vector<TermDictionary> partial(listings.size());
  const TermDictionary empty = dict;
  ParallelFor(listings.size(), jobs, [&](std::size_t i) {
    try {
      partial[i] = CountTerms(ParseListingFile(listings[i].path, listings[i].sample_id), empty);
    } catch (const std::exception& e) {
      throw Error("sample " + listings[i].sample_id + ": " + e.what());
    }
  });
  for (const TermDictionary& p : partial) dict.Merge(p);
  return dict;
}

RunReport RunPipeline(const PipelineConfig& cfg) {
  ValidateConfig(cfg);
  const ExtractionOptions options = ExtractionOptionsFor(cfg);
  const TermDictionary dict =
      cfg.dict_path.empty() ? TermDictionary::Default() : TermDictionary::FromFile(cfg.dict_path);
  const LabelMap labels = ReadLabels(cfg.labels_path);
  const SplitSpec split_spec = SplitSpecFor(cfg);

  const fs::path out = cfg.output_dir;
  fs::create_directories(out);
  StageRunner runner(out);

  // Content digests of every input; they key the extraction stages.
  const std::vector<ListingFile> listings = FindListings(cfg.input_dir);
  if (listings.empty()) throw ValidationError("no .asm listings in " + cfg.input_dir.string());
  std::vector<std::string> digests(listings.size());
  ParallelFor(listings.size(), cfg.jobs,
              [&](std::size_t i) { digests[i] = FileDigestHex(listings[i].path); });
  Json inputs = Json::array();
  for (std::size_t i = 0; i < listings.size(); ++i) inputs.push_back({listings[i].sample_id, digests[i]});
  const std::string inputs_key = Key(inputs);
  const std::string labels_key = FileDigestHex(cfg.labels_path);
  const Json header = [&] {
    FingerprintFile f;
    f.header = FingerprintHeader::For(options);
    return Json::parse(SerializeFingerprints(f));
  }();

  const fs::path freq_csv = out / "term_freq.csv";
  const fs::path segments_dir = out / "segments";
  const fs::path fp_path = out / "fingerprints.jsonl";
  const fs::path matrix_path = out / "matrix.bin";
  const fs::path vocab_path = out / "VOCAB.txt";
  const fs::path pred_path = out / "PRED.csv";
  const fs::path cm_path = out / "CM.csv";
  const fs::path metrics_path = out / "METRICS.csv";
  const fs::path sweep_path = out / "SWEEP.csv";
  const fs::path sweep_classes_path = out / "SWEEP_per_class.csv";

  Json dict_terms(dict.terms());
  const std::string freq_key = Key({"freq", inputs_key, dict_terms});
  Json freq_stats = runner.Run("freq", freq_key, {freq_csv}, [&] {
    TermDictionary counted = CountCorpusTerms(listings, dict, cfg.jobs);
    EmitHistogram(counted, freq_csv);
    Json s;
    s["instructions"] = counted.Total();
    s["unknown"] = counted.unknown_count();
    auto ranked = counted.Ranked();
    s["top_term"] = ranked.empty() ? "" : ranked.front().first;
    return s;
  });

  const std::string segment_key =
      Key({"segment", inputs_key, header["terminators"], header["split_at_function_start"]});
  Json segment_stats = runner.Run("segment", segment_key, {segments_dir}, [&] {
    fs::remove_all(segments_dir);
    fs::create_directories(segments_dir);
    std::vector<std::size_t> counts(listings.size());
    ParallelFor(listings.size(), cfg.jobs, [&](std::size_t i) {
      try {
        auto instructions = ParseListingFile(listings[i].path, listings[i].sample_id);
        auto segments = SegmentInstructions(instructions, options.segmenter);
        counts[i] = segments.size();
        WriteFile(segments_dir / (listings[i].sample_id + ".jsonl"), SegmentIndexJsonl(segments));
      } catch (const std::exception& e) {
        throw Error("sample " + listings[i].sample_id + ": " + e.what());
      }
    });
    Json s;
    std::size_t total = 0;
    for (std::size_t c : counts) total += c;
    s["segments"] = total;
    return s;
  });

  const std::string fp_key = Key({"fingerprint", inputs_key, labels_key, header});
  Json fp_stats = runner.Run("fingerprint", fp_key, {fp_path}, [&] {
    ParseDiagnostics diag;
    FingerprintFile file;
    file.header = FingerprintHeader::For(options);
    file.fingerprints = ExtractCorpus(listings, options, labels, cfg.jobs, &diag);
    WriteFingerprints(file, fp_path);
    std::set<ClassLabel> classes;
    std::size_t labeled = 0, empty = 0;
    for (const Fingerprint& fp : file.fingerprints) {
      if (fp.label) {
        ++labeled;
        classes.insert(*fp.label);
      }
      if (fp.hashes.empty()) ++empty;
    }
    Json s;
    s["fingerprints"] = file.fingerprints.size();
    s["labeled"] = labeled;
    s["classes"] = classes.size();
    s["empty_fingerprints"] = empty;
    s["lines"] = diag.lines;
    s["code_lines"] = diag.code_lines;
    s["non_code_lines"] = diag.non_code_lines;
    s["malformed_lines"] = diag.malformed_lines;
    return s;
  });

  const std::string encode_key = Key({"encode", fp_key});
  Json encode_stats = runner.Run("encode", encode_key, {matrix_path, vocab_path}, [&] {
    FingerprintFile file = ReadFingerprints(fp_path);
    Vocabulary vocab = BuildVocabulary(file.fingerprints);
    EncodedCorpus encoded = EncodeCorpus(file.fingerprints, vocab);
    WriteEncodedCorpus(encoded, matrix_path);
    WriteFile(vocab_path, vocab.Serialize());
    Json s;
    s["rows"] = encoded.size();
    s["vocabulary_dimension"] = vocab.dimension();
    return s;
  });

  Json split_json = {split_spec.train_numerator, split_spec.train_denominator, split_spec.seed,
                     split_spec.stratified};
  const std::string knn_key = Key({"knn", encode_key, split_json, cfg.k});
  Json knn_stats = runner.Run("knn", knn_key, {pred_path, cm_path}, [&] {
    EncodedCorpus encoded = ReadEncodedCorpus(matrix_path);
    SplitData data = ApplySplit(encoded, split_spec);
    if (cfg.k > data.train_rows.rows()) {
      throw ValidationError("k = " + std::to_string(cfg.k) + " exceeds the training set size " +
                            std::to_string(data.train_rows.rows()));
    }
    KnnModel model(data.train_rows, data.train_labels, cfg.k);
    std::vector<ClassLabel> predicted = model.PredictAll(data.test_rows, cfg.jobs);
    std::vector<PredictionRecord> records;
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      records.push_back({data.test_ids[i], data.test_labels[i], predicted[i]});
      cm.Add(data.test_labels[i], predicted[i]);
    }
    WriteFile(pred_path, PredictionsCsv(records));
    WriteFile(cm_path, cm.ToCsv());
    Json s;
    s["train"] = data.train_rows.rows();
    s["test"] = data.test_rows.rows();
    s["correct"] = cm.Trace();
    s["tie_policy"] = model.tie_policy();
    return s;
  });

  const std::string metrics_key = Key({"metrics", knn_key});
  Json metrics_stats = runner.Run("metrics", metrics_key, {metrics_path}, [&] {
    ConfusionMatrix cm = ConfusionFromPredictions(ParsePredictionsCsv(ReadFile(pred_path)));
    WriteFile(metrics_path, MetricsCsv(PerClassMetrics(cm)));
    Json s;
    s["total_accuracy"] = FormatRatio(TotalAccuracy(cm).value());
    s["correct"] = cm.Trace();
    s["test_size"] = cm.Total();
    return s;
  });

  const std::string sweep_key = Key({"sweep", encode_key, split_json, cfg.ks});
  Json sweep_stats = runner.Run("sweep", sweep_key, {sweep_path, sweep_classes_path}, [&] {
    EncodedCorpus encoded = ReadEncodedCorpus(matrix_path);
    SweepResult result = KSweep(encoded, split_spec, cfg.ks, cfg.jobs);
    WriteFile(sweep_path, SweepCsv(result));
    WriteFile(sweep_classes_path, SweepPerClassCsv(result));
    Json s = Json::array();
    for (const SweepRow& row : result.rows) {
      s.push_back({{"k", row.k}, {"total_accuracy", FormatRatio(row.total_accuracy.value())}});
    }
    return s;
  });

  Json manifest;
  manifest["tool_version"] = kToolVersion;
  manifest["config"] = ConfigJson(cfg);
  manifest["config_hash"] = Key(manifest["config"]);
  manifest["fingerprint_header"] = header;
  Json corpus;
  corpus["samples"] = fp_stats["fingerprints"];
  corpus["labeled"] = fp_stats["labeled"];
  corpus["classes"] = fp_stats["classes"];
  corpus["empty_fingerprints"] = fp_stats["empty_fingerprints"];
  corpus["vocabulary_dimension"] = encode_stats["vocabulary_dimension"];
  corpus["segments"] = segment_stats["segments"];
  corpus["instructions"] = freq_stats["instructions"];
  corpus["top_term"] = freq_stats["top_term"];
  corpus["train"] = knn_stats["train"];
  corpus["test"] = knn_stats["test"];
  corpus["parse"] = {{"lines", fp_stats["lines"]},
                     {"code_lines", fp_stats["code_lines"]},
                     {"non_code_lines", fp_stats["non_code_lines"]},
                     {"malformed_lines", fp_stats["malformed_lines"]}};
  manifest["corpus"] = corpus;
  Json results;
  results["k"] = cfg.k;
  results["tie_policy"] = knn_stats["tie_policy"];
  results["total_accuracy"] = metrics_stats["total_accuracy"];
  results["sweep"] = sweep_stats;
  manifest["results"] = results;
  Json stages = Json::array();
  for (std::size_t i = 0; i < runner.reports().size(); ++i) {
    const StageReport& r = runner.reports()[i];
    stages.push_back({{"name", r.name},
                      {"status", r.cached ? "cached" : "ran"},
                      {"key", runner.keys()[i]},
                      {"seconds", r.seconds}});
  }
  manifest["stages"] = stages;

  RunReport report;
  report.stages = runner.reports();
  report.manifest_path = out / "manifest.json";
  report.samples = fp_stats["fingerprints"].get<std::size_t>();
  report.vocabulary_dimension = encode_stats["vocabulary_dimension"].get<std::size_t>();
  report.classes = fp_stats["classes"].get<std::size_t>();
  report.total_accuracy = std::stod(metrics_stats["total_accuracy"].get<std::string>());
  WriteFile(report.manifest_path, manifest.dump(2) + "\n");
  return report;
}

}  // namespace ddgf
