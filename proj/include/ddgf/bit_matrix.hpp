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

#ifndef DDGF_BIT_MATRIX_HPP
#define DDGF_BIT_MATRIX_HPP

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ddgf {

using BitRow = std::span<const std::uint64_t>;

// Row-major packed bit matrix. Padding bits past `cols` in the last word of a
// row are always zero, so popcounts over whole words are exact.
class BitMatrix {
 public:
  BitMatrix() = default;
  BitMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_per_row_((cols + 63) / 64),
        words_(rows * words_per_row_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words_per_row() const { return words_per_row_; }

  void Set(std::size_t row, std::size_t col) {
    Check(row, col);
    words_[row * words_per_row_ + col / 64] |= std::uint64_t{1} << (col % 64);
  }

  bool Get(std::size_t row, std::size_t col) const {
    Check(row, col);
    return (words_[row * words_per_row_ + col / 64] >> (col % 64)) & 1u;
  }

  BitRow Row(std::size_t row) const {
    if (row >= rows_) throw std::out_of_range("BitMatrix row");
    return BitRow(words_.data() + row * words_per_row_, words_per_row_);
  }

  std::size_t Popcount(std::size_t row) const {
    std::size_t total = 0;
    for (std::uint64_t w : Row(row)) total += static_cast<std::size_t>(std::popcount(w));
    return total;
  }

  // Copies the listed rows, in order, into a new matrix.
  BitMatrix SelectRows(std::span<const std::size_t> indices) const {
    BitMatrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      BitRow src = Row(indices[i]);
      std::copy(src.begin(), src.end(), out.words_.begin() + static_cast<std::ptrdiff_t>(i * words_per_row_));
    }
    return out;
  }

  std::span<const std::uint64_t> words() const { return words_; }
  // Raw access for deserialization; callers must keep padding bits zero.
  std::span<std::uint64_t> mutable_words() { return words_; }

  bool operator==(const BitMatrix&) const = default;

 private:
  void Check(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw std::out_of_range("BitMatrix index");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace ddgf

#endif  // DDGF_BIT_MATRIX_HPP
