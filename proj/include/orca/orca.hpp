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

// Ordinal ranking of concept activations.
//
// Given the C x K concept logits of one image, the K highest-scoring concepts
// form an ordered set. ORCA-B predicts the category owning most of them and
// reports that share as confidence. ORCA-R replaces the plain count with
// rank-aware weights, so concepts near the top of the ranking count more.
// A prediction whose top concepts are spread across several categories gets
// low confidence even when its category-level softmax is peaked.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "orca/catalog.hpp"
#include "orca/scorers.hpp"

namespace orca {

struct RankedConcept {
  std::size_t concept_index = 0;   // global index into the flat catalog
  std::size_t category_index = 0;  // owning category
  double score = 0.0;

  friend bool operator==(const RankedConcept&, const RankedConcept&) = default;
};

// Top-k concepts sorted by score descending; equal scores are ordered by
// ascending global concept index.
using RankedTopK = std::vector<RankedConcept>;

// Throws ParameterError unless 1 <= k <= concept_logits.size() and
// concept_logits.size() is a multiple of concepts_per_category; InputError
// for non-finite logits.
RankedTopK top_k_concepts(std::span<const double> concept_logits,
                          std::size_t concepts_per_category, std::size_t k);

enum class WeightScheme { kLogarithmic, kLinear, kExponential, kUniform };

std::string_view to_string(WeightScheme scheme);
WeightScheme parse_weight_scheme(std::string_view name);  // ParameterError

// Rank weights for ranking vector r = [k, k-1, ..., 1]:
//   logarithmic  log(1 + r_i)
//   linear       r_i
//   exponential  exp(r_i - k)
//   uniform      1
// `raw` holds the unnormalized values and `weights` = raw / total.
struct RankWeights {
  WeightScheme scheme = WeightScheme::kLogarithmic;
  std::vector<double> raw;
  double total = 0.0;
  std::vector<double> weights;

  std::size_t size() const { return raw.size(); }
};

RankWeights rank_weights(std::size_t k, WeightScheme scheme);

// Counting rule. Prediction is the category with the most concepts
// in `topk`; ties go to the category whose best concept ranks highest.
// Confidence is count / k. Throws ParameterError if topk.size() != k or a
// category index is out of range.
Decision orca_b(const RankedTopK& topk, std::size_t num_categories,
                std::size_t k);
Decision orca_b(const RankedTopK& topk, const ConceptCatalog& catalog,
                std::size_t k);

// Rank-weighted counting. Per-category score is the sum of raw weights of
// its concepts (in rank order) divided by the raw total; prediction and tie
// rule as orca_b, confidence is the winning score. With uniform weights this
// reproduces orca_b bit for bit. Throws ParameterError on a length mismatch.
Decision orca_r(const RankedTopK& topk, const RankWeights& weights,
                std::size_t num_categories);
Decision orca_r(const RankedTopK& topk, const RankWeights& weights,
                const ConceptCatalog& catalog);

// Per-category weighted score vector used by orca_r (length num_categories).
std::vector<double> orca_r_scores(const RankedTopK& topk,
                                  const RankWeights& weights,
                                  std::size_t num_categories);

}  // namespace orca
