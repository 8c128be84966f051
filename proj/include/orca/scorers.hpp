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
#include <string>
#include <string_view>

#include "orca/bundle.hpp"
#include "orca/similarity.hpp"

namespace orca {

enum class Predictor { kZeroShot, kEnsemble, kDescClip };
enum class Csf { kMsp, kOdin, kDoctor };

inline constexpr double kDefaultOdinTemperature = 1000.0;

std::string_view to_string(Predictor p);
std::string_view to_string(Csf c);
// Accepts the names produced by to_string; throws ConfigurationError.
Predictor parse_predictor(std::string_view name);
Csf parse_csf(std::string_view name);

// One scored prediction. `method` is a tag such as "zero-shot+msp" or
// "orca-r".
struct PredictionRecord {
  std::size_t sample_index = 0;
  std::size_t predicted_category = 0;
  double confidence = 0.0;
  std::string method;
  bool correct = false;
};

struct Decision {
  std::size_t prediction = 0;
  double confidence = 0.0;
};

// Category logits from the category-name text embeddings.
LogitVector predict_zero_shot(const DatasetBundle& bundle, std::size_t sample);

// Per-category mean over prompt templates, accumulated in template order.
// Throws ConfigurationError if the bundle has no templates.
LogitVector predict_ensemble(const DatasetBundle& bundle, std::size_t sample);

// Per-category mean of the K concept logits.
LogitVector predict_descclip(const DatasetBundle& bundle, std::size_t sample);

// Reduces concept logits (length C x K, category-major) to per-category
// means. The running mean is exact when all K values are equal.
LogitVector mean_per_category(std::span<const double> concept_logits,
                              std::size_t k);

// Running mean over equal-length rows in the given order.
LogitVector mean_of_rows(std::span<const LogitVector> rows);

double csf_msp(std::span<const double> probs);
// MSP of the temperature-scaled softmax; no input perturbation.
double csf_odin(std::span<const double> logits,
                double temperature = kDefaultOdinTemperature);
// Sum of squared probabilities: the complement of DOCTOR's Gini rejection
// score 1 - sum(p^2), so higher means more confident.
double csf_doctor(std::span<const double> probs);

// Prediction (argmax of logits, lowest index on ties) plus the confidence
// produced by `csf`.
Decision apply_csf(Csf csf, std::span<const double> logits,
                   double odin_temperature = kDefaultOdinTemperature);

}  // namespace orca
