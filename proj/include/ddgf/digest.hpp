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

#ifndef DDGF_DIGEST_HPP
#define DDGF_DIGEST_HPP

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace ddgf {

// Unkeyed BLAKE2b with a 16-byte output. Integers are fed little-endian so
// digests do not depend on the host.
inline constexpr const char* kDigestAlgorithm = "blake2b-128";

using Digest128 = std::array<std::uint8_t, 16>;

class Hasher128 {
 public:
  Hasher128();
  ~Hasher128();
  Hasher128(const Hasher128&) = delete;
  Hasher128& operator=(const Hasher128&) = delete;

  Hasher128& Update(std::span<const std::uint8_t> bytes);
  Hasher128& Update(std::string_view text);
  Hasher128& UpdateU64(std::uint64_t value);
  Digest128 Final();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

std::string ToHex(std::span<const std::uint8_t> bytes);

// Digest of a whole file's contents, as lowercase hex.
std::string FileDigestHex(const std::filesystem::path& path);

std::string TextDigestHex(std::string_view text);

}  // namespace ddgf

#endif  // DDGF_DIGEST_HPP
