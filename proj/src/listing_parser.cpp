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

#include "ddgf/listing_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include "ddgf/common.hpp"

namespace ddgf {
namespace {

// Keep in sync with data/x86_opcodes.txt (checked by the unit tests).
constexpr std::array kDefaultOpcodes = {
    "aaa", "aad", "aam", "aas", "adc", "add", "addpd", "addps", "addsd",
    "addss", "and", "andnpd", "andnps", "andpd", "andps", "arpl", "bound",
    "bsf", "bsr", "bswap", "bt", "btc", "btr", "bts", "call", "cbw", "cdq",
    "cdqe", "clc", "cld", "cli", "cmc", "cmova", "cmovae", "cmovb", "cmovbe",
    "cmove", "cmovg", "cmovge", "cmovl", "cmovle", "cmovne", "cmovns",
    "cmovs", "cmp", "cmpps", "cmpsb", "cmpsd", "cmpsw", "cmpxchg", "cpuid",
    "cqo", "cvtsi2sd", "cvtsi2ss", "cvttsd2si", "cvttss2si", "cwd", "cwde",
    "daa", "das", "dec", "div", "divsd", "divss", "emms", "enter", "f2xm1",
    "fabs", "fadd", "faddp", "fchs", "fclex", "fcom", "fcomp", "fcompp",
    "fcos", "fdiv", "fdivp", "fdivr", "fdivrp", "ffree", "fiadd", "ficom",
    "fidiv", "fild", "fimul", "fist", "fistp", "fisub", "fld", "fld1",
    "fldcw", "fldz", "fmul", "fmulp", "fnclex", "fninit", "fnstcw", "fnstsw",
    "fpatan", "fprem", "frndint", "fscale", "fsin", "fsqrt", "fst", "fstp",
    "fstsw", "fsub", "fsubp", "fsubr", "fsubrp", "ftst", "fucom", "fucomp",
    "fucompp", "fwait", "fxam", "fxch", "hlt", "idiv", "imul", "in", "inc",
    "ins", "insb", "insd", "int", "int3", "into", "iret", "iretd", "ja", "jae",
    "jb", "jbe", "jc", "jcxz", "je", "jecxz", "jg", "jge", "jl", "jle", "jmp",
    "jna", "jnae", "jnb", "jnbe", "jnc", "jne", "jng", "jnge", "jnl", "jnle",
    "jno", "jnp", "jns", "jnz", "jo", "jp", "jpe", "jpo", "js", "jz", "lahf",
    "lds", "lea", "leave", "les", "lfs", "lgs", "lock", "lodsb", "lodsd",
    "lodsw", "loop", "loope", "loopne", "loopnz", "loopz", "lss", "mov",
    "movapd", "movaps", "movd", "movdqa", "movdqu", "movq", "movsb", "movsd",
    "movss", "movsw", "movsx", "movsxd", "movups", "movzx", "mul", "mulpd",
    "mulps", "mulsd", "mulss", "neg", "nop", "not", "or", "orpd", "orps",
    "out", "outs", "outsb", "outsd", "paddb", "paddd", "paddw", "pand",
    "pcmpeqb", "pop", "popa", "popad", "popf", "popfd", "por", "prefetcht0",
    "pshufd", "pslld", "psrld", "push", "pusha", "pushad", "pushf", "pushfd",
    "pxor", "rcl", "rcr", "rdtsc", "rep", "repe", "repne", "ret", "retf",
    "retn", "rol", "ror", "sahf", "sal", "sar", "sbb", "scasb", "scasd",
    "scasw", "setb", "setbe", "setg", "setge", "setl", "setle", "setnbe",
    "setnz", "setz", "shl", "shld", "shr", "shrd", "sldt", "stc", "std",
    "sti", "stosb", "stosd", "stosw", "sub", "subsd", "subss", "syscall",
    "sysenter", "test", "ucomisd", "ucomiss", "wait", "xadd", "xchg", "xlat",
    "xor", "xorpd", "xorps",
};

constexpr std::array kRegisters = {
    "al",   "ah",   "ax",   "eax",  "rax",  "bl",   "bh",   "bx",   "ebx",
    "rbx",  "cl",   "ch",   "cx",   "ecx",  "rcx",  "dl",   "dh",   "dx",
    "edx",  "rdx",  "si",   "esi",  "rsi",  "sil",  "di",   "edi",  "rdi",
    "dil",  "sp",   "esp",  "rsp",  "spl",  "bp",   "ebp",  "rbp",  "bpl",
    "r8",   "r9",   "r10",  "r11",  "r12",  "r13",  "r14",  "r15",  "r8d",
    "r9d",  "r10d", "r11d", "r12d", "r13d", "r14d", "r15d", "r8w",  "r9w",
    "r10w", "r11w", "r12w", "r13w", "r14w", "r15w", "r8b",  "r9b",  "r10b",
    "r11b", "r12b", "r13b", "r14b", "r15b", "cs",   "ds",   "es",   "fs",
    "gs",   "ss",   "st",   "mm0",  "mm1",  "mm2",  "mm3",  "mm4",  "mm5",
    "mm6",  "mm7",  "xmm0", "xmm1", "xmm2", "xmm3", "xmm4", "xmm5", "xmm6",
    "xmm7", "eip",  "rip",  "cr0",  "cr2",  "cr3",  "cr4",  "dr0",  "dr1",
    "dr2",  "dr3",  "dr6",  "dr7",
};

// Tokens that open non-code lines, either directly after the hex bytes or
// after a data label ("dword_402000 dd 0").
constexpr std::array kDirectives = {
    "align",  "assume", "db",      "dd",     "df",   "dq",      "dt",
    "dw",     "dup",    "end",     "endp",   "ends", "extern",  "extrn",
    "include", "org",   "proc",    "public", "segment", "struc", "unicode",
    "=",      "model",  "includelib",
};

constexpr std::array kPrefixes = {"lock", "rep", "repe", "repne", "repnz",
                                  "repz"};

template <std::size_t N>
bool InList(const std::array<const char*, N>& list, std::string_view token) {
  return std::any_of(list.begin(), list.end(),
                     [&](const char* s) { return token == s; });
}

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

bool IsHex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Cursor over one line. Token boundaries are whitespace.
class LineScanner {
 public:
  explicit LineScanner(std::string_view line) : line_(line) {}

  std::string_view Next() {
    SkipSpace();
    std::size_t start = pos_;
    while (pos_ < line_.size() && !IsSpace(line_[pos_])) ++pos_;
    return line_.substr(start, pos_ - start);
  }

  std::string_view Peek() {
    std::size_t saved = pos_;
    std::string_view token = Next();
    pos_ = saved;
    return token;
  }

  std::string_view Rest() {
    SkipSpace();
    return line_.substr(pos_);
  }

 private:
  void SkipSpace() {
    while (pos_ < line_.size() && IsSpace(line_[pos_])) ++pos_;
  }

  std::string_view line_;
  std::size_t pos_ = 0;
};

// Cuts a trailing ';' comment that is not inside a quoted string.
std::string_view StripComment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == ';') {
      return line.substr(0, i);
    }
  }
  return line;
}

// Two hex digits, or "??", optionally followed by the '+' IDA appends when the
// byte column is truncated. Lowercase data directives that happen to be valid
// hex ("db", "dd", "df") are not bytes.
bool IsByteGroup(std::string_view token) {
  if (!token.empty() && token.back() == '+') token.remove_suffix(1);
  if (token.size() != 2) return false;
  if (token == "??") return true;
  if (token == "db" || token == "dd" || token == "df") return false;
  return IsHex(token[0]) && IsHex(token[1]);
}

bool IsMnemonicToken(std::string_view token) {
  if (token.empty() || !std::isalpha(static_cast<unsigned char>(token[0]))) {
    return false;
  }
  return std::all_of(token.begin(), token.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_';
  });
}

// Parses "<section>:<hexaddr>". Returns false if the token does not fit.
bool ParseLocation(std::string_view token, std::optional<std::uint64_t>* address) {
  std::size_t colon = token.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= token.size()) {
    return false;
  }
  std::string_view hex = token.substr(colon + 1);
  if (hex.size() > 16 || !std::all_of(hex.begin(), hex.end(), IsHex)) return false;
  std::uint64_t value = 0;
  for (char c : hex) {
    value = value * 16 + static_cast<std::uint64_t>(
        std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                                                    : std::tolower(c) - 'a' + 10);
  }
  *address = value;
  return true;
}

enum class LineKind { kCode, kNonCode, kMalformed };

struct ParsedLine {
  LineKind kind = LineKind::kNonCode;
  bool proc_header = false;
  Instruction instruction;
};

ParsedLine ParseLine(std::string_view raw) {
  ParsedLine result;
  std::string_view line = StripComment(raw);
  LineScanner scan(line);
  std::string_view location = scan.Next();
  if (location.empty()) return result;  // blank or comment-only

  std::optional<std::uint64_t> address;
  if (!ParseLocation(location, &address)) {
    result.kind = LineKind::kMalformed;
    return result;
  }

  std::size_t byte_groups = 0;
  while (IsByteGroup(scan.Peek())) {
    scan.Next();
    ++byte_groups;
  }

  std::string token = Lower(scan.Next());
  if (byte_groups == 0) {
    // Labels, directives, proc headers and stack-variable definitions.
    if (Lower(scan.Peek()) == "proc") result.proc_header = true;
    return result;
  }
  if (token.empty()) return result;
  while (token.back() == ':') {
    token = Lower(scan.Next());
    if (token.empty()) return result;
  }
  if (InList(kDirectives, token) || InList(kDirectives, Lower(scan.Peek()))) {
    if (Lower(scan.Peek()) == "proc") result.proc_header = true;
    return result;
  }
  if (!IsMnemonicToken(token)) {
    result.kind = LineKind::kMalformed;
    return result;
  }
  if (InList(kPrefixes, token)) {
    std::string next = Lower(scan.Peek());
    if (IsMnemonicToken(next) && !IsRegisterName(next)) {
      scan.Next();
      token = std::move(next);
    }
  }

  result.kind = LineKind::kCode;
  result.instruction.mnemonic = std::move(token);
  result.instruction.operands = SplitOperands(scan.Rest());
  result.instruction.address = address;
  return result;
}

}  // namespace

ParseDiagnostics& ParseDiagnostics::operator+=(const ParseDiagnostics& other) {
  lines += other.lines;
  code_lines += other.code_lines;
  non_code_lines += other.non_code_lines;
  malformed_lines += other.malformed_lines;
  return *this;
}

bool IsRegisterName(std::string_view lowercase_token) {
  return InList(kRegisters, lowercase_token);
}

std::string NormalizeOperand(std::string_view operand) {
  std::string collapsed;
  collapsed.reserve(operand.size());
  for (char c : operand) {
    if (IsSpace(c) || c == '\n') {
      if (!collapsed.empty() && collapsed.back() != ' ') collapsed.push_back(' ');
    } else {
      collapsed.push_back(c);
    }
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();

  std::string out;
  out.reserve(collapsed.size());
  int bracket_depth = 0;
  char quote = 0;
  std::size_t i = 0;
  while (i < collapsed.size()) {
    char c = collapsed[i];
    if (quote) {
      if (c == quote) quote = 0;
      out.push_back(c);
      ++i;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '[') {
      ++bracket_depth;
    } else if (c == ']' && bracket_depth > 0) {
      --bracket_depth;
    }
    if (bracket_depth == 0 && std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < collapsed.size() &&
             (std::isalnum(static_cast<unsigned char>(collapsed[j])) ||
              collapsed[j] == '_')) {
        ++j;
      }
      std::string_view word(collapsed.data() + i, j - i);
      std::string lower = Lower(word);
      out.append(IsRegisterName(lower) ? std::string_view(lower) : word);
      i = j;
      continue;
    }
    out.push_back(c);
    ++i;
  }
  return out;
}

std::vector<std::string> SplitOperands(std::string_view field) {
  std::vector<std::string> operands;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  auto flush = [&](std::size_t end) {
    std::string piece = NormalizeOperand(field.substr(start, end - start));
    if (!piece.empty()) operands.push_back(std::move(piece));
  };
  for (std::size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    switch (c) {
      case '\'':
      case '"':
        quote = c;
        break;
      case '[':
      case '(':
      case '<':
        ++depth;
        break;
      case ']':
      case ')':
      case '>':
        if (depth > 0) --depth;
        break;
      case ',':
        if (depth == 0) {
          flush(i);
          start = i + 1;
        }
        break;
      default:
        break;
    }
  }
  flush(field.size());
  return operands;
}

std::vector<Instruction> ParseListing(std::string_view text,
                                      std::string_view sample_id,
                                      ParseDiagnostics* diagnostics) {
  std::vector<Instruction> instructions;
  ParseDiagnostics local;
  bool pending_function_start = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++local.lines;

    ParsedLine parsed = ParseLine(line);
    switch (parsed.kind) {
      case LineKind::kCode:
        ++local.code_lines;
        parsed.instruction.sample_id = std::string(sample_id);
        parsed.instruction.function_start = pending_function_start;
        pending_function_start = false;
        instructions.push_back(std::move(parsed.instruction));
        break;
      case LineKind::kNonCode:
        ++local.non_code_lines;
        if (parsed.proc_header) pending_function_start = true;
        break;
      case LineKind::kMalformed:
        ++local.malformed_lines;
        break;
    }
  }
  if (diagnostics) *diagnostics += local;
  return instructions;
}

std::vector<Instruction> ParseListingFile(const std::filesystem::path& path,
                                          std::string_view sample_id,
                                          ParseDiagnostics* diagnostics) {
  return ParseListing(ReadFile(path), sample_id, diagnostics);
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("read failed: " + path.string());
  return std::move(buffer).str();
}

void WriteFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) throw Error("write failed: " + path.string());
}

// --- TermDictionary ---

TermDictionary::TermDictionary(std::set<std::string> terms)
    : terms_(std::move(terms)) {}

TermDictionary TermDictionary::Default() {
  std::set<std::string> terms;
  for (const char* op : kDefaultOpcodes) terms.insert(op);
  return TermDictionary(std::move(terms));
}

TermDictionary TermDictionary::FromFile(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    std::string term = NormalizeOperand(line);
    if (term.empty() || term[0] == '#') continue;
    terms.insert(Lower(term));
  }
  if (terms.empty()) throw ValidationError("empty term dictionary: " + path.string());
  return TermDictionary(std::move(terms));
}

bool TermDictionary::Contains(std::string_view term) const {
  return terms_.find(std::string(term)) != terms_.end();
}

void TermDictionary::Add(std::string_view mnemonic, std::uint64_t count) {
  if (!Contains(mnemonic)) {
    unknown_ += count;
    return;
  }
  auto it = counts_.find(mnemonic);
  if (it == counts_.end()) {
    counts_.emplace(std::string(mnemonic), count);
  } else {
    it->second += count;
  }
}

void TermDictionary::Merge(const TermDictionary& other) {
  if (terms_ != other.terms_) throw Error("cannot merge term dictionaries with different term sets");
  for (const auto& [term, count] : other.counts_) Add(term, count);
  unknown_ += other.unknown_;
}

std::uint64_t TermDictionary::Count(std::string_view term) const {
  auto it = counts_.find(term);
  return it == counts_.end() ? 0 : it->second;
}

std::uint64_t TermDictionary::Total() const {
  std::uint64_t total = unknown_;
  for (const auto& [term, count] : counts_) total += count;
  return total;
}

std::vector<std::pair<std::string, std::uint64_t>> TermDictionary::Ranked() const {
  std::vector<std::pair<std::string, std::uint64_t>> rows;
  for (const auto& [term, count] : counts_) {
    if (count > 0) rows.emplace_back(term, count);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  return rows;
}

TermDictionary CountTerms(std::span<const Instruction> instructions,
                          TermDictionary dict) {
  for (const Instruction& ins : instructions) dict.Add(ins.mnemonic);
  return dict;
}

void WriteHistogram(const TermDictionary& dict, std::ostream& out) {
  out << "term,count\n";
  for (const auto& [term, count] : dict.Ranked()) out << term << ',' << count << '\n';
  if (dict.unknown_count() > 0) out << kUnknownTerm << ',' << dict.unknown_count() << '\n';
}

void EmitHistogram(const TermDictionary& dict, const std::filesystem::path& path) {
  std::ostringstream out;
  WriteHistogram(dict, out);
  WriteFile(path, out.str());
}

}  // namespace ddgf
