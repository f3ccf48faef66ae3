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

#include "ddgf/digest.hpp"

#include <sodium.h>

#include <fstream>
#include <vector>

#include "ddgf/common.hpp"

namespace ddgf {
namespace {

void EnsureSodium() {
  static const int status = sodium_init();
  if (status < 0) throw Error("libsodium initialization failed");
}

}  // namespace

struct Hasher128::State {
  crypto_generichash_state ctx;
};

Hasher128::Hasher128() : state_(std::make_unique<State>()) {
  EnsureSodium();
  crypto_generichash_init(&state_->ctx, nullptr, 0, 16);
}

Hasher128::~Hasher128() = default;

Hasher128& Hasher128::Update(std::span<const std::uint8_t> bytes) {
  crypto_generichash_update(&state_->ctx, bytes.data(), bytes.size());
  return *this;
}

Hasher128& Hasher128::Update(std::string_view text) {
  UpdateU64(text.size());
  crypto_generichash_update(&state_->ctx,
                            reinterpret_cast<const unsigned char*>(text.data()),
                            text.size());
  return *this;
}

Hasher128& Hasher128::UpdateU64(std::uint64_t value) {
  std::uint8_t le[8];
  for (int i = 0; i < 8; ++i) le[i] = static_cast<std::uint8_t>(value >> (8 * i));
  crypto_generichash_update(&state_->ctx, le, sizeof(le));
  return *this;
}

Digest128 Hasher128::Final() {
  Digest128 out{};
  crypto_generichash_final(&state_->ctx, out.data(), out.size());
  return out;
}

std::string ToHex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xf]);
  }
  return out;
}

std::string FileDigestHex(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  Hasher128 hasher;
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    std::streamsize got = in.gcount();
    if (got > 0) {
      hasher.Update(std::span<const std::uint8_t>(
          reinterpret_cast<const std::uint8_t*>(buffer.data()), static_cast<std::size_t>(got)));
    }
  }
  if (in.bad()) throw Error("read failed: " + path.string());
  return ToHex(hasher.Final());
}

std::string TextDigestHex(std::string_view text) {
  Hasher128 hasher;
  hasher.Update(text);
  return ToHex(hasher.Final());
}

}  // namespace ddgf
