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

#include "orca/similarity.hpp"

#include <cmath>
#include <string>

#include "orca/errors.hpp"

namespace orca {

namespace {

template <typename T>
std::vector<double> normalize_impl(std::span<const T> v) {
  if (v.empty()) {
    throw ShapeError("cannot normalize an empty vector");
  }
  double sq = 0.0;
  for (T x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  const double norm = std::sqrt(sq);
  if (!(norm >= kDegenerateNorm)) {
    throw DegenerateVectorError("cannot normalize a zero vector");
  }
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<double>(v[i]) / norm;
  }
  return out;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return acc;
}

double checked_image_norm(std::span<const float> image, std::size_t cols) {
  if (image.size() != cols) {
    throw ShapeError("image embedding has dimension " +
                     std::to_string(image.size()) + ", text matrix has " +
                     std::to_string(cols));
  }
  const double norm = l2_norm(image);
  if (!(norm >= kDegenerateNorm)) {
    throw DegenerateVectorError("image embedding is a zero vector");
  }
  return norm;
}

}  // namespace

std::vector<double> l2_normalize(std::span<const double> v) {
  return normalize_impl(v);
}

std::vector<double> l2_normalize(std::span<const float> v) {
  return normalize_impl(v);
}

double l2_norm(std::span<const float> v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sq);
}

TextBank::TextBank(const EmbeddingMatrix& text) : text_(&text) {
  norms_.resize(text.rows());
  for (std::size_t i = 0; i < text.rows(); ++i) {
    norms_[i] = l2_norm(text.row(i));
    if (!(norms_[i] >= kDegenerateNorm)) {
      throw DegenerateVectorError("text row " + std::to_string(i) +
                                  " is a zero vector");
    }
  }
}

LogitVector similarity_logits(std::span<const float> image,
                              const TextBank& text) {
  const EmbeddingMatrix& m = text.matrix();
  const double image_norm = checked_image_norm(image, m.cols());
  LogitVector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out[i] = kLogitScale * (dot(image, m.row(i)) / (image_norm * text.norm(i)));
  }
  return out;
}

LogitVector similarity_logits(std::span<const float> image,
                              const EmbeddingMatrix& text) {
  return similarity_logits(image, TextBank(text));
}

ProbabilityVector softmax(std::span<const double> logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ParameterError("softmax temperature must be positive and finite, got " +
                         std::to_string(temperature));
  }
  if (logits.empty()) {
    throw ShapeError("softmax of an empty logit vector");
  }
  double max = logits[0];
  for (double s : logits) {
    if (!std::isfinite(s)) throw InputError("non-finite logit");
    if (s > max) max = s;
  }
  ProbabilityVector p(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp((logits[i] - max) / temperature);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) {
    throw ShapeError("argmax of an empty vector");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace orca
