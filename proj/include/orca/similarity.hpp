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
#include <span>
#include <vector>

#include "orca/matrix.hpp"

namespace orca {

// CLIP's logit scale: logits are 100 x cosine similarity. Kept separate from
// any softmax temperature, which is applied on top of the scaled logits.
inline constexpr double kLogitScale = 100.0;

// Norms below this are treated as zero.
inline constexpr double kDegenerateNorm = 1e-12;

// Scaled cosine similarities (one entry per text row or per concept).
using LogitVector = std::vector<double>;
// Softmax output; sums to one.
using ProbabilityVector = std::vector<double>;

std::vector<double> l2_normalize(std::span<const double> v);
std::vector<double> l2_normalize(std::span<const float> v);

// Euclidean norm accumulated left to right in double precision.
double l2_norm(std::span<const float> v);

// Per-row norms of a text matrix, computed once and reused across images.
// Holds a reference: the matrix must outlive the bank.
// Throws DegenerateVectorError naming the first zero row.
class TextBank {
 public:
  explicit TextBank(const EmbeddingMatrix& text);

  const EmbeddingMatrix& matrix() const { return *text_; }
  std::size_t rows() const { return norms_.size(); }
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  const EmbeddingMatrix* text_;
  std::vector<double> norms_;
};

// entry i = 100 * cos(image, text row i). Dot products and norms are
// accumulated in double with a fixed sequential order over columns, so
// results are reproducible bit for bit.
LogitVector similarity_logits(std::span<const float> image,
                              const EmbeddingMatrix& text);
LogitVector similarity_logits(std::span<const float> image,
                              const TextBank& text);

// Temperature softmax with max-subtraction. Throws ParameterError for
// temperature <= 0 and InputError for non-finite logits.
ProbabilityVector softmax(std::span<const double> logits,
                          double temperature = 1.0);

// Index of the maximum entry; the lowest index wins ties.
std::size_t argmax(std::span<const double> values);

}  // namespace orca
