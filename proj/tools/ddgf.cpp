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

// ddgf: data-dependency-graph fingerprints for disassembly listings.
//
// Exit codes: 0 success, 1 validation error, 2 runtime failure.

#include <charconv>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "ddgf/common.hpp"
#include "ddgf/ddg_builder.hpp"
#include "ddgf/eval_metrics.hpp"
#include "ddgf/fingerprint_store.hpp"
#include "ddgf/hamming_knn.hpp"
#include "ddgf/labels.hpp"
#include "ddgf/listing_parser.hpp"
#include "ddgf/pipeline.hpp"
#include "ddgf/segmenter.hpp"
#include "ddgf/sweep.hpp"
#include "ddgf/synthetic_corpus.hpp"
#include "ddgf/wl_hasher.hpp"

namespace fs = std::filesystem;

namespace ddgf {
namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

std::uint64_t ParseUnsigned(const std::string& key, const std::string& text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

bool ParseBool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ValidationError(key + ": expected true or false, got '" + text + "'");
}

// "3/4" -> {3, 4}.
std::pair<std::uint64_t, std::uint64_t> ParseFraction(const std::string& text) {
  auto slash = text.find('/');
  if (slash == std::string::npos) {
    throw ValidationError("train fraction must look like NUM/DEN, got '" + text + "'");
  }
  return {ParseUnsigned("train fraction", text.substr(0, slash)),
          ParseUnsigned("train fraction", text.substr(slash + 1))};
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::size_t> ParseKs(const std::string& text) {
  try {
    return ParseKList(text);
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError(std::string("bad k list: ") + e.what());
  }
}

// Applies one key of a run config file. Relative paths resolve against the
// directory holding the config file.
void ApplyConfigItem(PipelineConfig& cfg, const std::string& key, const std::vector<std::string>& values,
                     const fs::path& base) {
  auto single = [&]() -> const std::string& {
    if (values.size() != 1) throw ValidationError("config key '" + key + "' expects one value");
    return values.front();
  };
  auto path = [&]() {
    fs::path p = single();
    return p.is_relative() ? base / p : p;
  };
  if (key == "input_dir") {
    cfg.input_dir = path();
  } else if (key == "labels") {
    cfg.labels_path = path();
  } else if (key == "terminators") {
    cfg.terminators_path = single().empty() ? fs::path() : path();
  } else if (key == "dict") {
    cfg.dict_path = single().empty() ? fs::path() : path();
  } else if (key == "output_dir") {
    cfg.output_dir = path();
  } else if (key == "instruction_filter") {
    cfg.instruction_filter.clear();
    for (const std::string& v : values) {
      for (const std::string& m : SplitList(v)) cfg.instruction_filter.push_back(m);
    }
  } else if (key == "wl_iterations") {
    cfg.wl_iterations = static_cast<int>(ParseUnsigned(key, single()));
  } else if (key == "split_at_function_start") {
    cfg.split_at_function_start = ParseBool(key, single());
  } else if (key == "seed") {
    cfg.seed = ParseUnsigned(key, single());
  } else if (key == "train_fraction") {
    std::tie(cfg.train_numerator, cfg.train_denominator) = ParseFraction(single());
  } else if (key == "stratified") {
    cfg.stratified = ParseBool(key, single());
  } else if (key == "k") {
    cfg.k = ParseUnsigned(key, single());
  } else if (key == "ks") {
    std::string joined;
    for (const std::string& v : values) joined += (joined.empty() ? "" : ",") + v;
    cfg.ks = ParseKs(joined);
  } else if (key == "jobs") {
    cfg.jobs = static_cast<unsigned>(ParseUnsigned(key, single()));
  } else {
    throw ValidationError("unknown config key '" + key + "'");
  }
}

void LoadConfigFile(PipelineConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config file not found: " + path.string());
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::ParseError& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  fs::path base = path.parent_path();
  for (const CLI::ConfigItem& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty()) {
      throw ValidationError("config file " + path.string() + ": sections are not supported");
    }
    ApplyConfigItem(cfg, item.name, item.inputs, base);
  }
}

TerminatorSet LoadTerminators(const std::string& path) {
  if (path.empty()) return TerminatorSet::Default();
  if (!fs::is_regular_file(path)) throw ValidationError("terminator file not found: " + path);
  return TerminatorSet::FromFile(path);
}

ExtractionOptions MakeExtractionOptions(const std::string& terminators, const std::string& filter,
                                        int iterations, bool no_function_split) {
  ExtractionOptions options;
  options.segmenter.terminators = LoadTerminators(terminators);
  options.segmenter.split_at_function_start = !no_function_split;
  std::vector<std::string> mnemonics = SplitList(filter);
  if (mnemonics.empty()) throw ValidationError("instruction filter is empty");
  options.filter = InstructionFilter(mnemonics.begin(), mnemonics.end());
  if (iterations < 1) throw ValidationError("WL iterations must be >= 1");
  options.wl_iterations = iterations;
  return options;
}

SplitSpec MakeSplitSpec(const std::string& fraction, std::uint64_t seed, bool stratified) {
  auto [num, den] = ParseFraction(fraction);
  if (den == 0 || num == 0 || num >= den) {
    throw ValidationError("train fraction must lie strictly between 0 and 1");
  }
  return SplitSpec{num, den, seed, stratified};
}

// Reads an encoded matrix and, if given, replaces its labels with the CSV's.
EncodedCorpus LoadCorpus(const std::string& matrix, const std::string& labels_path) {
  if (!fs::is_regular_file(matrix)) throw ValidationError("matrix file not found: " + matrix);
  std::optional<LabelMap> labels;
  if (!labels_path.empty()) labels = ReadLabels(labels_path);
  EncodedCorpus corpus = ReadEncodedCorpus(matrix);
  if (labels) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto it = labels->find(corpus.sample_ids[i]);
      corpus.labels[i] = it == labels->end() ? std::nullopt : std::optional<ClassLabel>(it->second);
    }
  }
  return corpus;
}

void RequireDirectory(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("input directory not found: " + dir);
}

int Main(int argc, char** argv) {
  CLI::App app{"Data-dependency-graph fingerprints for disassembly listings"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions global;
  app.add_option("--seed", global.seed, "Split and generator seed")->capture_default_str();
  app.add_option("--jobs", global.jobs, "Worker threads per stage")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str();

  // freq
  std::string freq_input, freq_dict, freq_out;
  auto* freq = app.add_subcommand("freq", "Opcode frequency histogram over a corpus");
  freq->add_option("--input", freq_input, "Directory of .asm listings")->required();
  freq->add_option("--dict", freq_dict, "Opcode dictionary (one term per line)");
  freq->add_option("--out", freq_out, "Output CSV (stdout if omitted)");

  // segment
  std::string seg_input, seg_terminators, seg_out;
  bool seg_no_split = false;
  auto* segment = app.add_subcommand("segment", "Write per-sample segment indices");
  segment->add_option("--input", seg_input, "Directory of .asm listings")->required();
  segment->add_option("--terminators", seg_terminators, "Terminator mnemonic file");
  segment->add_flag("--no-function-split", seg_no_split, "Do not cut at function starts");
  segment->add_option("--out", seg_out, "Output directory for <id>.jsonl")->required();

  // fingerprint
  std::string fp_input, fp_labels, fp_terminators, fp_filter = "mov", fp_out;
  int fp_iterations = kDefaultWlIterations;
  bool fp_no_split = false;
  auto* fingerprint = app.add_subcommand("fingerprint", "Extract WL graph-hash fingerprints");
  fingerprint->add_option("--input", fp_input, "Directory of .asm listings")->required();
  fingerprint->add_option("--labels", fp_labels, "Label CSV (Id,Class)");
  fingerprint->add_option("--terminators", fp_terminators, "Terminator mnemonic file");
  fingerprint->add_option("--filter", fp_filter, "Comma-separated mnemonics")->capture_default_str();
  fingerprint->add_option("--iterations", fp_iterations, "WL iterations")->capture_default_str();
  fingerprint->add_flag("--no-function-split", fp_no_split, "Do not cut at function starts");
  fingerprint->add_option("--out", fp_out, "Output fingerprint JSONL")->required();

  // encode
  std::vector<std::string> enc_fp;
  std::string enc_out, enc_vocab;
  auto* encode = app.add_subcommand("encode", "One-hot encode fingerprints into a bit matrix");
  encode->add_option("--fp", enc_fp, "Fingerprint JSONL (repeat to merge)")->required();
  encode->add_option("--out", enc_out, "Output matrix file")->required();
  encode->add_option("--vocab", enc_vocab, "Output vocabulary file")->required();

  // distances
  std::string dist_matrix, dist_out, dist_method = "xor";
  auto* distances = app.add_subcommand("distances", "Pairwise Hamming distances as CSV");
  distances->add_option("--matrix", dist_matrix, "Encoded matrix")->required();
  distances->add_option("--method", dist_method, "xor or dot")
      ->check(CLI::IsMember({"xor", "dot"}))
      ->capture_default_str();
  distances->add_option("--out", dist_out, "Output CSV")->required();

  // knn
  std::string knn_matrix, knn_labels, knn_fraction = "3/4", knn_out, knn_cm;
  std::size_t knn_k = 2;
  bool knn_stratified = false;
  auto* knn = app.add_subcommand("knn", "Split, classify the test side, write predictions");
  knn->add_option("--matrix", knn_matrix, "Encoded matrix")->required();
  knn->add_option("--labels", knn_labels, "Label CSV overriding embedded labels");
  knn->add_option("--k", knn_k, "Neighbours")->capture_default_str();
  knn->add_option("--train-fraction", knn_fraction, "Training fraction NUM/DEN")->capture_default_str();
  knn->add_flag("--stratified", knn_stratified, "Per-class split");
  knn->add_option("--out", knn_out, "Output predictions CSV")->required();
  knn->add_option("--cm", knn_cm, "Also write the confusion matrix CSV");

  // metrics
  std::string met_pred, met_out, met_cm;
  auto* metrics = app.add_subcommand("metrics", "Per-class metrics from predictions");
  metrics->add_option("--pred", met_pred, "Predictions CSV")->required();
  metrics->add_option("--out", met_out, "Output metrics CSV")->required();
  metrics->add_option("--cm", met_cm, "Also write the confusion matrix CSV");

  // sweep
  std::string sw_matrix, sw_labels, sw_ks = "2:19", sw_fraction = "3/4", sw_out, sw_classes;
  bool sw_stratified = false;
  auto* sweep = app.add_subcommand("sweep", "Accuracy over a range of k on one split");
  sweep->add_option("--matrix", sw_matrix, "Encoded matrix")->required();
  sweep->add_option("--labels", sw_labels, "Label CSV overriding embedded labels");
  sweep->add_option("--ks", sw_ks, "k values: A:B, a,b,c or a single k")->capture_default_str();
  sweep->add_option("--train-fraction", sw_fraction, "Training fraction NUM/DEN")->capture_default_str();
  sweep->add_flag("--stratified", sw_stratified, "Per-class split");
  sweep->add_option("--out", sw_out, "Output sweep CSV")->required();
  sweep->add_option("--per-class", sw_classes, "Also write per-class metrics per k");

  // run
  std::string run_config, run_input, run_labels, run_terminators, run_dict, run_filter, run_fraction,
      run_ks, run_out;
  int run_iterations = 0;
  std::size_t run_k = 0;
  bool run_stratified = false, run_no_split = false;
  auto* run = app.add_subcommand("run", "Run every stage with caching and a manifest");
  run->add_option("--config", run_config, "Key = value config file");
  auto* o_input = run->add_option("--input", run_input, "Directory of .asm listings");
  auto* o_labels = run->add_option("--labels", run_labels, "Label CSV");
  auto* o_terminators = run->add_option("--terminators", run_terminators, "Terminator file");
  auto* o_dict = run->add_option("--dict", run_dict, "Opcode dictionary");
  auto* o_filter = run->add_option("--filter", run_filter, "Comma-separated mnemonics");
  auto* o_iterations = run->add_option("--iterations", run_iterations, "WL iterations");
  auto* o_fraction = run->add_option("--train-fraction", run_fraction, "Training fraction NUM/DEN");
  auto* o_k = run->add_option("--k", run_k, "k for predictions and metrics");
  auto* o_ks = run->add_option("--ks", run_ks, "k values for the sweep");
  auto* o_stratified = run->add_flag("--stratified", run_stratified, "Per-class split");
  auto* o_no_split = run->add_flag("--no-function-split", run_no_split, "Do not cut at function starts");
  auto* o_out = run->add_option("--out", run_out, "Output directory");

  // gen-synthetic
  std::string gen_out;
  std::size_t gen_n = 5;
  auto* gen = app.add_subcommand("gen-synthetic", "Write a synthetic nine-family corpus");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--n", gen_n, "Samples per class")->capture_default_str();

  // graph
  std::string gr_input, gr_sample, gr_terminators, gr_filter = "mov";
  std::size_t gr_segment = 0;
  int gr_iterations = kDefaultWlIterations;
  bool gr_no_split = false;
  auto* graph = app.add_subcommand("graph", "Print one segment's dependency graph");
  graph->add_option("--input", gr_input, "Directory of .asm listings")->default_val(".");
  graph->add_option("--sample", gr_sample, "Sample id")->required();
  graph->add_option("--segment", gr_segment, "Segment index")->required();
  graph->add_option("--terminators", gr_terminators, "Terminator file");
  graph->add_option("--filter", gr_filter, "Comma-separated mnemonics")->capture_default_str();
  graph->add_option("--iterations", gr_iterations, "WL iterations")->capture_default_str();
  graph->add_flag("--no-function-split", gr_no_split, "Do not cut at function starts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*freq) {
      RequireDirectory(freq_input);
      TermDictionary dict = freq_dict.empty() ? TermDictionary::Default() : TermDictionary::FromFile(freq_dict);
      TermDictionary counted = CountCorpusTerms(FindListings(freq_input), dict, global.jobs);
      if (freq_out.empty()) {
        WriteHistogram(counted, std::cout);
      } else {
        EmitHistogram(counted, freq_out);
      }
    } else if (*segment) {
      RequireDirectory(seg_input);
      SegmenterOptions options;
      options.terminators = LoadTerminators(seg_terminators);
      options.split_at_function_start = !seg_no_split;
      std::vector<ListingFile> listings = FindListings(seg_input);
      fs::create_directories(seg_out);
      ParallelFor(listings.size(), global.jobs, [&](std::size_t i) {
        try {
          auto instructions = ParseListingFile(listings[i].path, listings[i].sample_id);
          auto segments = SegmentInstructions(instructions, options);
          WriteFile(fs::path(seg_out) / (listings[i].sample_id + ".jsonl"), SegmentIndexJsonl(segments));
        } catch (const std::exception& e) {
          throw Error("sample " + listings[i].sample_id + ": " + e.what());
        }
      });
    } else if (*fingerprint) {
      RequireDirectory(fp_input);
      ExtractionOptions options = MakeExtractionOptions(fp_terminators, fp_filter, fp_iterations, fp_no_split);
      LabelMap labels = fp_labels.empty() ? LabelMap{} : ReadLabels(fp_labels);
      FingerprintFile file;
      file.header = FingerprintHeader::For(options);
      file.fingerprints = ExtractCorpus(FindListings(fp_input), options, labels, global.jobs);
      WriteFingerprints(file, fp_out);
    } else if (*encode) {
      FingerprintFile merged;
      for (std::size_t i = 0; i < enc_fp.size(); ++i) {
        if (!fs::is_regular_file(enc_fp[i])) throw ValidationError("fingerprint file not found: " + enc_fp[i]);
        FingerprintFile f = ReadFingerprints(enc_fp[i]);
        merged = i == 0 ? std::move(f) : MergeFingerprints(merged, f);
      }
      Vocabulary vocab = BuildVocabulary(merged.fingerprints);
      WriteEncodedCorpus(EncodeCorpus(merged.fingerprints, vocab), enc_out);
      WriteFile(enc_vocab, vocab.Serialize());
    } else if (*distances) {
      EncodedCorpus corpus = LoadCorpus(dist_matrix, "");
      DistanceMethod method = dist_method == "dot" ? DistanceMethod::kInnerProduct : DistanceMethod::kXorPopcount;
      WriteFile(dist_out, DistancesCsv(PairwiseDistances(corpus.matrix, method, global.jobs), corpus.sample_ids));
    } else if (*knn) {
      SplitSpec spec = MakeSplitSpec(knn_fraction, global.seed, knn_stratified);
      EncodedCorpus corpus = LoadCorpus(knn_matrix, knn_labels);
      SplitData data = ApplySplit(corpus, spec);
      if (knn_k == 0 || knn_k > data.train_rows.rows()) {
        throw ValidationError("k must lie in 1.." + std::to_string(data.train_rows.rows()));
      }
      KnnModel model(data.train_rows, data.train_labels, knn_k);
      std::vector<ClassLabel> predicted = model.PredictAll(data.test_rows, global.jobs);
      std::vector<PredictionRecord> records;
      ConfusionMatrix cm;
      for (std::size_t i = 0; i < predicted.size(); ++i) {
        records.push_back({data.test_ids[i], data.test_labels[i], predicted[i]});
        cm.Add(data.test_labels[i], predicted[i]);
      }
      WriteFile(knn_out, PredictionsCsv(records));
      if (!knn_cm.empty()) WriteFile(knn_cm, cm.ToCsv());
      std::cout << "k=" << knn_k << " train=" << data.train_rows.rows() << " test=" << data.test_rows.rows()
                << " accuracy=" << FormatRatio(TotalAccuracy(cm).value()) << "\n";
    } else if (*metrics) {
      if (!fs::is_regular_file(met_pred)) throw ValidationError("predictions file not found: " + met_pred);
      ConfusionMatrix cm = ConfusionFromPredictions(ParsePredictionsCsv(ReadFile(met_pred)));
      WriteFile(met_out, MetricsCsv(PerClassMetrics(cm)));
      if (!met_cm.empty()) WriteFile(met_cm, cm.ToCsv());
      std::cout << "accuracy=" << FormatRatio(TotalAccuracy(cm).value()) << "\n";
    } else if (*sweep) {
      SplitSpec spec = MakeSplitSpec(sw_fraction, global.seed, sw_stratified);
      std::vector<std::size_t> ks = ParseKs(sw_ks);
      EncodedCorpus corpus = LoadCorpus(sw_matrix, sw_labels);
      SweepResult result = KSweep(corpus, spec, ks, global.jobs);
      WriteFile(sw_out, SweepCsv(result));
      if (!sw_classes.empty()) WriteFile(sw_classes, SweepPerClassCsv(result));
    } else if (*run) {
      PipelineConfig cfg;
      cfg.seed = global.seed;
      cfg.jobs = global.jobs;
      if (!run_config.empty()) LoadConfigFile(cfg, run_config);
      // Flags override the config file.
      if (app.get_option("--seed")->count()) cfg.seed = global.seed;
      if (app.get_option("--jobs")->count()) cfg.jobs = global.jobs;
      if (o_input->count()) cfg.input_dir = run_input;
      if (o_labels->count()) cfg.labels_path = run_labels;
      if (o_terminators->count()) cfg.terminators_path = run_terminators;
      if (o_dict->count()) cfg.dict_path = run_dict;
      if (o_filter->count()) cfg.instruction_filter = SplitList(run_filter);
      if (o_iterations->count()) cfg.wl_iterations = run_iterations;
      if (o_fraction->count()) std::tie(cfg.train_numerator, cfg.train_denominator) = ParseFraction(run_fraction);
      if (o_k->count()) cfg.k = run_k;
      if (o_ks->count()) cfg.ks = ParseKs(run_ks);
      if (o_stratified->count()) cfg.stratified = run_stratified;
      if (o_no_split->count()) cfg.split_at_function_start = !run_no_split;
      if (o_out->count()) cfg.output_dir = run_out;
      RunReport report = RunPipeline(cfg);
      for (const StageReport& stage : report.stages) {
        std::printf("%-12s %-7s %.3fs\n", stage.name.c_str(), stage.cached ? "cached" : "ran", stage.seconds);
      }
      std::printf("samples=%zu classes=%zu vocabulary=%zu accuracy(k=%zu)=%.4f\n", report.samples,
                  report.classes, report.vocabulary_dimension, cfg.k, report.total_accuracy);
      std::printf("manifest: %s\n", report.manifest_path.string().c_str());
    } else if (*gen) {
      fs::path labels = WriteSyntheticCorpus(gen_out, gen_n, global.seed);
      std::cout << "wrote " << gen_n * kNumClasses << " listings and " << labels.string() << "\n";
    } else if (*graph) {
      ExtractionOptions options = MakeExtractionOptions(gr_terminators, gr_filter, gr_iterations, gr_no_split);
      fs::path listing = fs::path(gr_input) / (gr_sample + ".asm");
      if (!fs::is_regular_file(listing)) throw ValidationError("listing not found: " + listing.string());
      auto instructions = ParseListingFile(listing, gr_sample);
      auto segments = SegmentInstructions(instructions, options.segmenter);
      if (gr_segment >= segments.size()) {
        throw ValidationError("segment " + std::to_string(gr_segment) + " out of range; sample has " +
                              std::to_string(segments.size()) + " segments");
      }
      DepGraph g = BuildGraph(segments[gr_segment], options.filter);
      std::cout << FormatGraph(g);
      if (!g.empty()) std::cout << "wl " << WlHash(g, options.wl_iterations).Hex() << "\n";
    }
  } catch (const ValidationError& e) {
    std::cerr << "ddgf: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "ddgf: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace
}  // namespace ddgf

int main(int argc, char** argv) { return ddgf::Main(argc, argv); }
