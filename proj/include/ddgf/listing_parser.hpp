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

#ifndef DDGF_LISTING_PARSER_HPP
#define DDGF_LISTING_PARSER_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ddgf {

// One code line of an IDA text-section listing.
struct Instruction {
  std::string mnemonic;               // lowercase, never empty
  std::vector<std::string> operands;  // source order, destination first
  std::optional<std::uint64_t> address;
  std::string sample_id;
  // Set on the first instruction following a `proc` header.
  bool function_start = false;

  bool operator==(const Instruction&) const = default;
};

struct ParseDiagnostics {
  std::size_t lines = 0;
  std::size_t code_lines = 0;
  // Blank lines, comments, labels, directives and data definitions.
  std::size_t non_code_lines = 0;
  // Lines that do not fit the `<section>:<addr> ...` grammar, or carry hex
  // bytes followed by something that is not a mnemonic.
  std::size_t malformed_lines = 0;

  ParseDiagnostics& operator+=(const ParseDiagnostics& other);
};

// Parses a listing in file order. Never throws on content; anything that is
// not an instruction is skipped and tallied in `diagnostics` (if given).
std::vector<Instruction> ParseListing(std::string_view text,
                                      std::string_view sample_id,
                                      ParseDiagnostics* diagnostics = nullptr);

// Reads `path` and parses it; throws Error if the file cannot be read.
std::vector<Instruction> ParseListingFile(const std::filesystem::path& path,
                                          std::string_view sample_id,
                                          ParseDiagnostics* diagnostics = nullptr);

// Collapses whitespace and lowercases register names outside of brackets.
// Bracketed memory expressions are kept verbatim. Idempotent.
std::string NormalizeOperand(std::string_view operand);

// Splits an operand field on top-level commas (outside [], (), <> and quotes)
// and normalizes every piece. An empty field yields no operands.
std::vector<std::string> SplitOperands(std::string_view field);

bool IsRegisterName(std::string_view lowercase_token);

// Opcode term dictionary with occurrence counts. Mnemonics outside the known
// term set are tallied in a single unknown bucket.
class TermDictionary {
 public:
  TermDictionary() = default;
  explicit TermDictionary(std::set<std::string> terms);

  // The bundled x86/64 opcode set.
  static TermDictionary Default();
  // One term per line; blank lines and lines starting with '#' are ignored.
  static TermDictionary FromFile(const std::filesystem::path& path);

  bool Contains(std::string_view term) const;
  void Add(std::string_view mnemonic, std::uint64_t count = 1);
  // Sums counts; both dictionaries must share the same term set.
  void Merge(const TermDictionary& other);

  std::uint64_t Count(std::string_view term) const;
  std::uint64_t unknown_count() const { return unknown_; }
  std::uint64_t Total() const;
  const std::set<std::string>& terms() const { return terms_; }

  // Terms with a nonzero count, descending by count, ties alphabetical.
  std::vector<std::pair<std::string, std::uint64_t>> Ranked() const;

  bool operator==(const TermDictionary&) const = default;

 private:
  std::set<std::string> terms_;
  std::map<std::string, std::uint64_t, std::less<>> counts_;
  std::uint64_t unknown_ = 0;
};

inline constexpr const char* kUnknownTerm = "<unknown>";

TermDictionary CountTerms(std::span<const Instruction> instructions,
                          TermDictionary dict);

// Writes "term,count\n" followed by the ranked rows; a nonzero unknown bucket
// is emitted last as "<unknown>".
void WriteHistogram(const TermDictionary& dict, std::ostream& out);
void EmitHistogram(const TermDictionary& dict,
                   const std::filesystem::path& path);

// Whole-file helpers shared by the tools.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace ddgf

#endif  // DDGF_LISTING_PARSER_HPP
