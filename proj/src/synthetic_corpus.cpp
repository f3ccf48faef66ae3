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

#include "ddgf/synthetic_corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "ddgf/common.hpp"
#include "ddgf/listing_parser.hpp"

namespace ddgf {
namespace {

struct Motif {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // src -> dst
};

Motif Chain(std::size_t n) {
  Motif m{n, {}};
  for (std::size_t i = 0; i + 1 < n; ++i) m.edges.emplace_back(i, i + 1);
  return m;
}

Motif FanOut(std::size_t leaves) {
  Motif m{leaves + 1, {}};
  for (std::size_t i = 1; i <= leaves; ++i) m.edges.emplace_back(0, i);
  return m;
}

Motif FanIn(std::size_t leaves) {
  Motif m{leaves + 1, {}};
  for (std::size_t i = 1; i <= leaves; ++i) m.edges.emplace_back(i, 0);
  return m;
}

Motif Cycle(std::size_t n) {
  Motif m{n, {}};
  for (std::size_t i = 0; i < n; ++i) m.edges.emplace_back(i, (i + 1) % n);
  return m;
}

// Family f (0-based) is sized f + 2 so no two families share a topology.
std::vector<Motif> FamilyMotifs(std::size_t f) {
  return {Chain(f + 3), FanOut(f + 2), FanIn(f + 2), Cycle(f + 2)};
}

// Small shapes none of the family motifs take.
std::vector<Motif> NoiseMotifs() {
  return {
      {2, {{0, 1}}},
      {1, {{0, 0}}},
      {2, {{0, 1}, {0, 1}}},
      {4, {{0, 1}, {2, 3}}},
      {3, {{0, 1}, {1, 0}, {1, 2}}},
      {4, {{0, 1}, {2, 1}, {2, 3}}},
      {3, {{0, 1}, {1, 2}, {0, 2}}},
      {2, {{0, 1}, {1, 1}}},
  };
}

constexpr std::array kRegisters = {"eax", "ebx", "ecx", "edx", "esi", "edi"};
constexpr std::array kFiller = {"add", "xor", "cmp", "lea", "test", "shl", "inc", "and", "sub", "movzx"};
constexpr std::array kBranches = {"jz", "jnz", "jmp", "call", "jb", "ja", "jle"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::size_t Below(std::size_t n) { return static_cast<std::size_t>(UniformBelow(engine_, n)); }
  bool Chance(unsigned percent) { return Below(100) < percent; }
  template <typename C>
  const auto& Pick(const C& c) { return c[Below(c.size())]; }

 private:
  std::mt19937_64 engine_;
};

std::vector<std::string> OperandPool() {
  std::vector<std::string> pool(kRegisters.begin(), kRegisters.end());
  for (int off = 4; off <= 0x40; off += 4) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "[ebp+var_%X]", off);
    pool.emplace_back(buf);
  }
  pool.emplace_back("dword ptr [esi+8]");
  pool.emplace_back("dword ptr [edi+0Ch]");
  return pool;
}

class ListingWriter {
 public:
  explicit ListingWriter(Rng& rng) : rng_(rng) {}

  void Raw(const std::string& section, const std::string& text) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s:%08X", section.c_str(), address_);
    out_ += buf;
    if (!text.empty()) {
      out_ += ' ';
      out_ += text;
    }
    out_ += '\n';
  }

  void Code(const std::string& mnemonic, const std::string& operands) {
    std::size_t n_bytes = 1 + rng_.Below(6);
    std::string bytes;
    for (std::size_t i = 0; i < n_bytes; ++i) {
      char b[4];
      std::snprintf(b, sizeof(b), "%02X", static_cast<unsigned>(rng_.Below(256)));
      if (!bytes.empty()) bytes += ' ';
      bytes += b;
    }
    if (n_bytes == 6) bytes += '+';
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-40s%-8s%s", bytes.c_str(), mnemonic.c_str(), operands.c_str());
    Raw(".text", buf);
    address_ += static_cast<std::uint32_t>(n_bytes);
  }

  std::uint32_t address() const { return address_; }
  void set_address(std::uint32_t a) { address_ = a; }
  std::string Take() { return std::move(out_); }

 private:
  Rng& rng_;
  std::uint32_t address_ = 0x401000;
  std::string out_;
};

std::string SampleId(Rng& rng) {
  static constexpr char kAlphabet[] =
      "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
  std::string id(20, '0');
  for (char& c : id) c = kAlphabet[rng.Below(sizeof(kAlphabet) - 1)];
  return id;
}

void EmitFiller(ListingWriter& w, Rng& rng) {
  std::string mnemonic = rng.Pick(kFiller);
  std::string a = rng.Pick(kRegisters);
  std::string b = rng.Pick(kRegisters);
  if (mnemonic == "inc") {
    w.Code(mnemonic, a);
  } else if (mnemonic == "lea") {
    w.Code(mnemonic, a + ", [" + b + "+4]");
  } else if (mnemonic == "movzx") {
    w.Code(mnemonic, a + ", byte ptr [" + b + "]");
  } else {
    w.Code(mnemonic, a + ", " + b);
  }
}

void EmitMotifBlock(ListingWriter& w, Rng& rng, const Motif& motif,
                    const std::vector<std::string>& pool) {
  std::vector<std::string> names = pool;
  for (std::size_t i = 0; i < motif.nodes; ++i) {
    std::swap(names[i], names[i + rng.Below(names.size() - i)]);
  }
  auto edges = motif.edges;
  for (std::size_t i = edges.size(); i > 1; --i) std::swap(edges[i - 1], edges[rng.Below(i)]);
  for (const auto& [src, dst] : edges) {
    if (rng.Chance(40)) EmitFiller(w, rng);
    w.Code("mov", names[dst] + ", " + names[src]);
  }
  if (rng.Chance(30)) w.Code("push", rng.Pick(kRegisters));
}

void EmitTerminator(ListingWriter& w, Rng& rng) {
  std::string branch = rng.Pick(kBranches);
  char target[32];
  std::snprintf(target, sizeof(target), "%s_%X", branch == "call" ? "sub" : "loc",
                0x401000 + static_cast<unsigned>(rng.Below(0x4000)));
  w.Code(branch, branch == "call" ? target : std::string("short ") + target);
}

std::string BuildListing(Rng& rng, std::size_t family) {
  static const std::vector<std::string> pool = OperandPool();
  static const std::vector<Motif> noise = NoiseMotifs();

  std::vector<Motif> blocks;
  std::vector<Motif> own = FamilyMotifs(family);
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < own.size(); ++i) {
    if (rng.Chance(75)) picked.push_back(i);
  }
  while (picked.size() < 2) {
    std::size_t i = rng.Below(own.size());
    if (std::find(picked.begin(), picked.end(), i) == picked.end()) picked.push_back(i);
  }
  for (std::size_t i : picked) blocks.push_back(own[i]);
  for (const Motif& m : noise) {
    if (rng.Chance(40)) blocks.push_back(m);
  }
  if (rng.Chance(25)) {
    std::size_t other = (family + 1 + rng.Below(8)) % 9;
    blocks.push_back(rng.Pick(FamilyMotifs(other)));
  }
  // Blocks without data movement yield empty graphs.
  std::size_t empty_blocks = 1 + rng.Below(3);
  for (std::size_t i = 0; i < empty_blocks; ++i) blocks.push_back(Motif{});
  for (std::size_t i = blocks.size(); i > 1; --i) std::swap(blocks[i - 1], blocks[rng.Below(i)]);

  ListingWriter w(rng);
  w.Raw("HEADER", "; Input MD5   : synthetic");
  w.Raw(".text", "; Segment type: Pure code");
  w.Raw(".text", "_text           segment para public 'CODE' use32");
  w.Raw(".text", "                assume cs:_text");

  std::size_t b = 0;
  while (b < blocks.size()) {
    char name[32];
    std::snprintf(name, sizeof(name), "sub_%X", w.address());
    w.Raw(".text", "");
    w.Raw(".text", "; =============== S U B R O U T I N E =======================================");
    w.Raw(".text", std::string(name) + "         proc near");
    w.Code("push", "ebp");
    std::size_t per_function = 1 + rng.Below(4);
    for (std::size_t i = 0; i < per_function && b < blocks.size(); ++i, ++b) {
      if (i > 0) {
        char label[128];
        std::snprintf(label, sizeof(label), "loc_%X:                                 ; CODE XREF: %s+3j",
                      w.address(), name);
        w.Raw(".text", label);
      }
      if (blocks[b].nodes == 0) {
        w.Code("push", "offset aKernel32");
        if (rng.Chance(50)) EmitFiller(w, rng);
      } else {
        EmitMotifBlock(w, rng, blocks[b], pool);
      }
      EmitTerminator(w, rng);
    }
    w.Code("pop", "ebp");
    w.Code("retn", "");
    w.Raw(".text", std::string(name) + "         endp");
    if (rng.Chance(50)) {
      w.Raw(".text", "; ---------------------------------------------------------------------------");
      w.Raw(".text", "CC CC CC                                align 10h");
      w.set_address((w.address() + 0xf) & ~0xfu);
    }
  }
  w.Raw(".text", "_text           ends");
  w.set_address(0x405000);
  w.Raw(".data", "; Segment type: Pure data");
  w.Raw(".data", "dword_405000    dd 0                    ; DATA XREF: sub_401000+4r");
  w.set_address(0x405004);
  w.Raw(".data", "00 00 00 00 unk_405004      db    0");
  w.set_address(0x405008);
  w.Raw(".data", "aKernel32       db 'kernel32.dll',0");
  return w.Take();
}

}  // namespace

std::vector<SyntheticSample> GenerateSyntheticSamples(std::size_t n_per_class, std::uint64_t seed) {
  if (n_per_class == 0) throw ValidationError("samples per class must be >= 1");
  Rng rng(seed);
  std::vector<SyntheticSample> samples;
  std::set<std::string> ids;
  for (std::size_t family = 0; family < static_cast<std::size_t>(kNumClasses); ++family) {
    for (std::size_t n = 0; n < n_per_class; ++n) {
      SyntheticSample s;
      do {
        s.sample_id = SampleId(rng);
      } while (!ids.insert(s.sample_id).second);
      s.label = static_cast<ClassLabel>(family + 1);
      s.listing = BuildListing(rng, family);
      samples.push_back(std::move(s));
    }
  }
  std::sort(samples.begin(), samples.end(),
            [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
  return samples;
}

std::filesystem::path WriteSyntheticCorpus(const std::filesystem::path& dir,
                                           std::size_t n_per_class, std::uint64_t seed) {
  std::vector<SyntheticSample> samples = GenerateSyntheticSamples(n_per_class, seed);
  std::filesystem::create_directories(dir);
  std::string labels = "\"Id\",\"Class\"\n";
  for (const SyntheticSample& s : samples) {
    WriteFile(dir / (s.sample_id + ".asm"), s.listing);
    labels += "\"" + s.sample_id + "\"," + std::to_string(s.label) + "\n";
  }
  std::filesystem::path labels_path = dir / "trainLabels.csv";
  WriteFile(labels_path, labels);
  return labels_path;
}

}  // namespace ddgf
