/*
 * Copyright 2026 The orcafd Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace orca {

// Dense row-major matrix of 32-bit embeddings, one row per image or text
// entry. The l2_normalized flag records what the producer claims; nothing
// here re-normalizes.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;

  // Throws ShapeError if rows or cols is zero or data.size() != rows * cols,
  // and ValidationError if l2_normalized is set but some row norm is off by
  // more than kNormTolerance.
  EmbeddingMatrix(std::size_t rows, std::size_t cols, std::vector<float> data,
                  bool l2_normalized = false);

  static constexpr double kNormTolerance = 1e-4;

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool l2_normalized() const { return l2_normalized_; }
  bool empty() const { return rows_ == 0; }

  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const float> data() const { return data_; }

  // Copies the given rows, in order, into a new matrix.
  EmbeddingMatrix select_rows(std::span<const std::size_t> indices) const;

  friend bool operator==(const EmbeddingMatrix&,
                         const EmbeddingMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  bool l2_normalized_ = false;
};

// On-disk tensor layout, little-endian:
//   [0, 8)        magic "ORCAEMB1"
//   [8, 12)       uint32 header length H
//   [12, 12 + H)  UTF-8 JSON header {"cols","dtype":"f32","l2_normalized","rows"}
//   remainder     rows * cols * 4 bytes of row-major f32
inline constexpr char kTensorMagic[8] = {'O', 'R', 'C', 'A',
                                         'E', 'M', 'B', '1'};
inline constexpr std::uint32_t kTensorFormatVersion = 1;

EmbeddingMatrix read_matrix(const std::filesystem::path& path);

// Output is a pure function of the matrix: rewriting yields identical bytes.
void write_matrix(const EmbeddingMatrix& matrix,
                  const std::filesystem::path& path);

}  // namespace orca
