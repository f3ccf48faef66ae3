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

#include "ddgf/fingerprint_store.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "ddgf/common.hpp"
#include "json.hpp"

namespace ddgf {
namespace {

using Json = nlohmann::ordered_json;

constexpr char kMatrixMagic[8] = {'D', 'D', 'G', 'F', 'B', 'I', 'T', 'S'};
constexpr std::uint32_t kMatrixVersion = 1;
constexpr int kFingerprintFormat = 1;

Json HeaderToJson(const FingerprintHeader& h) {
  Json j;
  j["ddgf_fingerprints"] = kFingerprintFormat;
  j["tool_version"] = h.tool_version;
  j["wl_iterations"] = h.wl_iterations;
  j["wl_scheme"] = h.wl_scheme;
  j["digest"] = h.digest;
  j["terminators"] = h.terminators;
  j["instruction_filter"] = h.instruction_filter;
  j["split_at_function_start"] = h.split_at_function_start;
  return j;
}

FingerprintHeader HeaderFromJson(const Json& j) {
  if (!j.is_object() || j.value("ddgf_fingerprints", 0) != kFingerprintFormat) {
    throw Error("not a ddgf fingerprint file (bad header line)");
  }
  FingerprintHeader h;
  h.tool_version = j.at("tool_version").get<std::string>();
  h.wl_iterations = j.at("wl_iterations").get<int>();
  h.wl_scheme = j.at("wl_scheme").get<std::string>();
  h.digest = j.at("digest").get<std::string>();
  h.terminators = j.at("terminators").get<std::vector<std::string>>();
  h.instruction_filter = j.at("instruction_filter").get<std::vector<std::string>>();
  h.split_at_function_start = j.at("split_at_function_start").get<bool>();
  return h;
}

void SortById(std::vector<Fingerprint>& fps) {
  std::sort(fps.begin(), fps.end(),
            [](const Fingerprint& a, const Fingerprint& b) { return a.sample_id < b.sample_id; });
  auto dup = std::adjacent_find(fps.begin(), fps.end(), [](const auto& a, const auto& b) {
    return a.sample_id == b.sample_id;
  });
  if (dup != fps.end()) throw Error("duplicate sample id " + dup->sample_id);
}

template <typename T>
void PutLe(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>(static_cast<std::uint64_t>(value) >> (8 * i)));
  }
}

class Reader {
 public:
  Reader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}

  template <typename T>
  T Le() {
    Need(sizeof(T));
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string_view Bytes(std::size_t n) {
    Need(n);
    std::string_view out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  void Need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw Error(context_ + ": truncated matrix file");
  }

  std::string_view data_;
  std::string context_;
  std::size_t pos_ = 0;
};

}  // namespace

Fingerprint BuildFingerprint(std::string_view sample_id, std::span<const Segment> segments,
                             const InstructionFilter& filter, int iterations) {
  Fingerprint fp;
  fp.sample_id = std::string(sample_id);
  for (const Segment& seg : segments) {
    DepGraph graph = BuildGraph(seg, filter);
    if (graph.empty()) continue;
    fp.hashes.insert(WlHash(graph, iterations));
  }
  return fp;
}

Fingerprint ExtractFingerprint(const std::filesystem::path& listing, std::string_view sample_id,
                               const ExtractionOptions& options,
                               ParseDiagnostics* diagnostics) {
  std::vector<Instruction> instructions = ParseListingFile(listing, sample_id, diagnostics);
  std::vector<Segment> segments = SegmentInstructions(instructions, options.segmenter);
  return BuildFingerprint(sample_id, segments, options.filter, options.wl_iterations);
}

FingerprintHeader FingerprintHeader::For(const ExtractionOptions& options) {
  FingerprintHeader h;
  h.tool_version = kToolVersion;
  h.wl_iterations = options.wl_iterations;
  h.wl_scheme = kWlScheme;
  h.digest = kDigestAlgorithm;
  const auto& terms = options.segmenter.terminators.mnemonics();
  h.terminators.assign(terms.begin(), terms.end());
  h.instruction_filter.assign(options.filter.begin(), options.filter.end());
  h.split_at_function_start = options.segmenter.split_at_function_start;
  return h;
}

std::string SerializeFingerprints(const FingerprintFile& file) {
  std::vector<Fingerprint> sorted = file.fingerprints;
  SortById(sorted);
  std::string out = HeaderToJson(file.header).dump();
  out.push_back('\n');
  for (const Fingerprint& fp : sorted) {
    Json j;
    j["id"] = fp.sample_id;
    j["label"] = fp.label ? Json(*fp.label) : Json(nullptr);
    Json hashes = Json::array();
    for (const GraphHash& h : fp.hashes) hashes.push_back(h.Hex());
    j["hashes"] = std::move(hashes);
    out += j.dump();
    out.push_back('\n');
  }
  return out;
}

FingerprintFile ParseFingerprints(std::string_view jsonl) {
  FingerprintFile file;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool have_header = false;
  while (pos < jsonl.size()) {
    std::size_t eol = jsonl.find('\n', pos);
    if (eol == std::string_view::npos) eol = jsonl.size();
    std::string_view line = jsonl.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw Error("fingerprint line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!have_header) {
      file.header = HeaderFromJson(j);
      have_header = true;
      continue;
    }
    Fingerprint fp;
    try {
      fp.sample_id = j.at("id").get<std::string>();
      const Json& label = j.at("label");
      if (!label.is_null()) {
        int value = label.get<int>();
        if (!IsValidClass(value)) throw Error("label out of range");
        fp.label = value;
      }
      for (const Json& h : j.at("hashes")) {
        auto hash = GraphHash::FromHex(h.get<std::string>());
        if (!hash) throw Error("bad hash '" + h.get<std::string>() + "'");
        fp.hashes.insert(*hash);
      }
    } catch (const Json::exception& e) {
      throw Error("fingerprint line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("fingerprint line " + std::to_string(line_no) + ": " + e.what());
    }
    file.fingerprints.push_back(std::move(fp));
  }
  if (!have_header) throw Error("empty fingerprint file");
  SortById(file.fingerprints);
  return file;
}

void WriteFingerprints(const FingerprintFile& file, const std::filesystem::path& path) {
  WriteFile(path, SerializeFingerprints(file));
}

FingerprintFile ReadFingerprints(const std::filesystem::path& path) {
  try {
    return ParseFingerprints(ReadFile(path));
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

FingerprintFile MergeFingerprints(const FingerprintFile& a, const FingerprintFile& b) {
  if (!(a.header == b.header)) {
    throw Error("refusing to merge fingerprint files with different headers");
  }
  FingerprintFile merged{a.header, a.fingerprints};
  merged.fingerprints.insert(merged.fingerprints.end(), b.fingerprints.begin(),
                             b.fingerprints.end());
  SortById(merged.fingerprints);
  return merged;
}

// --- Vocabulary ---

Vocabulary::Vocabulary(std::vector<GraphHash> hashes) : hashes_(std::move(hashes)) {
  std::sort(hashes_.begin(), hashes_.end());
  hashes_.erase(std::unique(hashes_.begin(), hashes_.end()), hashes_.end());
}

std::optional<std::size_t> Vocabulary::IndexOf(const GraphHash& hash) const {
  auto it = std::lower_bound(hashes_.begin(), hashes_.end(), hash);
  if (it == hashes_.end() || *it != hash) return std::nullopt;
  return static_cast<std::size_t>(it - hashes_.begin());
}

std::string Vocabulary::Serialize() const {
  std::string out;
  out.reserve(hashes_.size() * 33);
  for (const GraphHash& h : hashes_) {
    out += h.Hex();
    out.push_back('\n');
  }
  return out;
}

Vocabulary Vocabulary::Parse(std::string_view text) {
  std::vector<GraphHash> hashes;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    auto hash = GraphHash::FromHex(line);
    if (!hash) throw Error("vocabulary line " + std::to_string(line_no) + ": bad hash");
    hashes.push_back(*hash);
  }
  return Vocabulary(std::move(hashes));
}

Vocabulary BuildVocabulary(std::span<const Fingerprint> corpus) {
  std::set<GraphHash> all;
  for (const Fingerprint& fp : corpus) all.insert(fp.hashes.begin(), fp.hashes.end());
  return Vocabulary(std::vector<GraphHash>(all.begin(), all.end()));
}

// --- Encoding ---

EncodedCorpus EncodeCorpus(std::span<const Fingerprint> corpus, const Vocabulary& vocab) {
  std::vector<const Fingerprint*> order;
  order.reserve(corpus.size());
  for (const Fingerprint& fp : corpus) order.push_back(&fp);
  std::sort(order.begin(), order.end(),
            [](const Fingerprint* a, const Fingerprint* b) { return a->sample_id < b->sample_id; });

  EncodedCorpus out;
  out.matrix = BitMatrix(order.size(), vocab.dimension());
  for (std::size_t row = 0; row < order.size(); ++row) {
    const Fingerprint& fp = *order[row];
    if (row > 0 && order[row - 1]->sample_id == fp.sample_id) {
      throw Error("duplicate sample id " + fp.sample_id);
    }
    for (const GraphHash& h : fp.hashes) {
      auto col = vocab.IndexOf(h);
      if (!col) {
        throw Error("sample " + fp.sample_id + ": hash " + h.Hex() +
                    " is not in the vocabulary (re-encode the corpus)");
      }
      out.matrix.Set(row, *col);
    }
    out.sample_ids.push_back(fp.sample_id);
    out.labels.push_back(fp.label);
  }
  return out;
}

std::set<GraphHash> DecodeRow(const EncodedCorpus& encoded, std::size_t row,
                              const Vocabulary& vocab) {
  if (encoded.matrix.cols() != vocab.dimension()) {
    throw Error("vocabulary dimension does not match the encoded matrix");
  }
  std::set<GraphHash> hashes;
  for (std::size_t col = 0; col < vocab.dimension(); ++col) {
    if (encoded.matrix.Get(row, col)) hashes.insert(vocab.hashes()[col]);
  }
  return hashes;
}

void WriteEncodedCorpus(const EncodedCorpus& encoded, const std::filesystem::path& path) {
  std::string out(kMatrixMagic, sizeof(kMatrixMagic));
  PutLe<std::uint32_t>(out, kMatrixVersion);
  PutLe<std::uint32_t>(out, 0);
  PutLe<std::uint64_t>(out, encoded.matrix.rows());
  PutLe<std::uint64_t>(out, encoded.matrix.cols());
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(encoded.sample_ids[i].size()));
    out += encoded.sample_ids[i];
    PutLe<std::uint8_t>(out, static_cast<std::uint8_t>(encoded.labels[i].value_or(0)));
  }
  out.reserve(out.size() + encoded.matrix.words().size() * 8);
  for (std::uint64_t w : encoded.matrix.words()) PutLe<std::uint64_t>(out, w);
  WriteFile(path, out);
}

EncodedCorpus ReadEncodedCorpus(const std::filesystem::path& path) {
  std::string data = ReadFile(path);
  Reader in(data, path.string());
  if (in.Bytes(sizeof(kMatrixMagic)) != std::string_view(kMatrixMagic, sizeof(kMatrixMagic))) {
    throw Error(path.string() + ": not a ddgf matrix file");
  }
  if (in.Le<std::uint32_t>() != kMatrixVersion) {
    throw Error(path.string() + ": unsupported matrix version");
  }
  in.Le<std::uint32_t>();
  auto rows = in.Le<std::uint64_t>();
  auto cols = in.Le<std::uint64_t>();
  if (rows > data.size()) throw Error(path.string() + ": corrupt row count");

  EncodedCorpus out;
  for (std::uint64_t i = 0; i < rows; ++i) {
    auto len = in.Le<std::uint32_t>();
    out.sample_ids.emplace_back(in.Bytes(len));
    auto label = in.Le<std::uint8_t>();
    if (label != 0 && !IsValidClass(label)) throw Error(path.string() + ": bad label byte");
    out.labels.push_back(label == 0 ? std::nullopt : std::optional<ClassLabel>(label));
  }
  out.matrix = BitMatrix(rows, cols);
  std::uint64_t pad_mask = cols % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (cols % 64)) - 1;
  auto words = out.matrix.mutable_words();
  std::size_t wpr = out.matrix.words_per_row();
  for (std::size_t k = 0; k < words.size(); ++k) {
    words[k] = in.Le<std::uint64_t>();
    if (k % wpr == wpr - 1 && (words[k] & ~pad_mask) != 0) {
      throw Error(path.string() + ": nonzero padding bits");
    }
  }
  if (!in.AtEnd()) throw Error(path.string() + ": trailing bytes in matrix file");
  return out;
}

}  // namespace ddgf
