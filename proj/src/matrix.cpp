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

#include "orca/matrix.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>

#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/fs.hpp"

namespace orca {

namespace {

constexpr std::size_t kPreambleSize = sizeof(kTensorMagic) + 4;

std::uint32_t load_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32_le(std::uint32_t v, char* p) {
  for (int i = 0; i < 4; ++i) {
    p[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  }
}

float load_f32_le(const unsigned char* p) {
  return std::bit_cast<float>(load_u32_le(p));
}

void store_f32_le(float f, char* p) {
  store_u32_le(std::bit_cast<std::uint32_t>(f), p);
}

std::string header_text(const EmbeddingMatrix& m) {
  nlohmann::json header = {{"rows", m.rows()},
                           {"cols", m.cols()},
                           {"dtype", "f32"},
                           {"l2_normalized", m.l2_normalized()}};
  return header.dump();
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t cols,
                                 std::vector<float> data, bool l2_normalized)
    : rows_(rows),
      cols_(cols),
      data_(std::move(data)),
      l2_normalized_(l2_normalized) {
  if (rows_ == 0 || cols_ == 0) {
    throw ShapeError("embedding matrix must have at least one row and column, "
                     "got " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("embedding data has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(rows_) + "x" +
                     std::to_string(cols_));
  }
  if (l2_normalized_) {
    for (std::size_t r = 0; r < rows_; ++r) {
      double sq = 0.0;
      for (float v : row(r)) sq += static_cast<double>(v) * v;
      if (std::abs(std::sqrt(sq) - 1.0) > kNormTolerance) {
        throw ValidationError("row " + std::to_string(r) +
                              " is flagged l2_normalized but has norm " +
                              std::to_string(std::sqrt(sq)));
      }
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::select_rows(
    std::span<const std::size_t> indices) const {
  std::vector<float> out;
  out.reserve(indices.size() * cols_);
  for (std::size_t i : indices) {
    if (i >= rows_) {
      throw ShapeError("row index " + std::to_string(i) + " out of range for " +
                       std::to_string(rows_) + " rows");
    }
    auto r = row(i);
    out.insert(out.end(), r.begin(), r.end());
  }
  return EmbeddingMatrix(indices.size(), cols_, std::move(out),
                         l2_normalized_);
}

EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::string where = " in " + path.string();

  if (bytes.size() < kPreambleSize ||
      std::memcmp(bytes.data(), kTensorMagic, sizeof(kTensorMagic)) != 0) {
    throw FormatError("bad tensor magic" + where);
  }
  const std::uint32_t header_len = load_u32_le(p + sizeof(kTensorMagic));
  if (header_len > bytes.size() - kPreambleSize) {
    throw CorruptionError("header length " + std::to_string(header_len) +
                          " exceeds file size" + where);
  }

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(
        bytes.begin() + kPreambleSize,
        bytes.begin() + kPreambleSize + header_len);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("unparseable tensor header" + where + ": " + e.what());
  }

  std::size_t rows = 0;
  std::size_t cols = 0;
  bool normalized = false;
  std::string dtype;
  try {
    rows = header.at("rows").get<std::size_t>();
    cols = header.at("cols").get<std::size_t>();
    dtype = header.at("dtype").get<std::string>();
    normalized = header.at("l2_normalized").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed tensor header" + where + ": " + e.what());
  }
  if (dtype != "f32") {
    throw UnsupportedDtypeError("unsupported dtype '" + dtype + "'" + where);
  }
  if (rows == 0 || cols == 0) {
    throw FormatError("tensor header declares an empty matrix" + where);
  }

  // Size check happens before any payload allocation.
  const std::size_t payload = bytes.size() - kPreambleSize - header_len;
  if (cols > std::numeric_limits<std::size_t>::max() / 4 / rows ||
      rows * cols * 4 != payload) {
    throw CorruptionError("declared " + std::to_string(rows) + "x" +
                          std::to_string(cols) + " f32 payload but found " +
                          std::to_string(payload) + " bytes" + where);
  }

  std::vector<float> data(rows * cols);
  const unsigned char* src = p + kPreambleSize + header_len;
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = load_f32_le(src + 4 * i);
  }
  try {
    return EmbeddingMatrix(rows, cols, std::move(data), normalized);
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(e.what()) + where);
  }
}

void write_matrix(const EmbeddingMatrix& matrix,
                  const std::filesystem::path& path) {
  if (matrix.empty()) {
    throw ShapeError("refusing to write an empty matrix to " + path.string());
  }
  const std::string header = header_text(matrix);
  std::string bytes(kPreambleSize + header.size() + matrix.data().size() * 4,
                    '\0');
  std::memcpy(bytes.data(), kTensorMagic, sizeof(kTensorMagic));
  store_u32_le(static_cast<std::uint32_t>(header.size()),
               bytes.data() + sizeof(kTensorMagic));
  std::memcpy(bytes.data() + kPreambleSize, header.data(), header.size());
  char* dst = bytes.data() + kPreambleSize + header.size();
  for (float v : matrix.data()) {
    store_f32_le(v, dst);
    dst += 4;
  }
  write_file_atomic(path, bytes);
}

}  // namespace orca
