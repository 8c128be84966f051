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

#include "orca/orca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "orca/errors.hpp"

namespace orca {

namespace {

constexpr std::size_t kNotRanked = std::numeric_limits<std::size_t>::max();

void check_topk(const RankedTopK& topk, std::size_t num_categories) {
  if (topk.empty()) {
    throw ParameterError("empty top-k ranking");
  }
  for (const auto& e : topk) {
    if (e.category_index >= num_categories) {
      throw ParameterError("ranked concept " + std::to_string(e.concept_index) +
                           " belongs to category " +
                           std::to_string(e.category_index) + " but only " +
                           std::to_string(num_categories) + " exist");
    }
  }
}

// Rank position of each category's first (best) concept.
std::vector<std::size_t> first_rank(const RankedTopK& topk,
                                    std::size_t num_categories) {
  std::vector<std::size_t> first(num_categories, kNotRanked);
  for (std::size_t r = 0; r < topk.size(); ++r) {
    auto& f = first[topk[r].category_index];
    if (f == kNotRanked) f = r;
  }
  return first;
}

// Argmax with the tie rule shared by both variants.
template <typename T>
std::size_t pick_category(const std::vector<T>& score,
                          const std::vector<std::size_t>& first) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < score.size(); ++c) {
    if (score[c] > score[best] ||
        (score[c] == score[best] && first[c] < first[best])) {
      best = c;
    }
  }
  return best;
}

}  // namespace

RankedTopK top_k_concepts(std::span<const double> concept_logits,
                          std::size_t concepts_per_category, std::size_t k) {
  const std::size_t n = concept_logits.size();
  if (concepts_per_category == 0 || n % concepts_per_category != 0) {
    throw ParameterError("concept logits of length " + std::to_string(n) +
                         " do not hold a whole number of categories of " +
                         std::to_string(concepts_per_category));
  }
  if (k < 1 || k > n) {
    throw ParameterError("top-k depth " + std::to_string(k) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  for (double s : concept_logits) {
    if (!std::isfinite(s)) throw InputError("non-finite concept logit");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k),
                    order.end(), [&](std::size_t a, std::size_t b) {
                      if (concept_logits[a] != concept_logits[b]) {
                        return concept_logits[a] > concept_logits[b];
                      }
                      return a < b;
                    });
  RankedTopK out(k);
  for (std::size_t r = 0; r < k; ++r) {
    out[r] = {order[r], order[r] / concepts_per_category,
              concept_logits[order[r]]};
  }
  return out;
}

std::string_view to_string(WeightScheme scheme) {
  switch (scheme) {
    case WeightScheme::kLogarithmic:
      return "logarithmic";
    case WeightScheme::kLinear:
      return "linear";
    case WeightScheme::kExponential:
      return "exponential";
    case WeightScheme::kUniform:
      return "uniform";
  }
  return "?";
}

WeightScheme parse_weight_scheme(std::string_view name) {
  for (auto s : {WeightScheme::kLogarithmic, WeightScheme::kLinear,
                 WeightScheme::kExponential, WeightScheme::kUniform}) {
    if (to_string(s) == name) return s;
  }
  throw ParameterError("unknown weighting scheme '" + std::string(name) +
                       "' (expected logarithmic, linear, exponential or "
                       "uniform)");
}

RankWeights rank_weights(std::size_t k, WeightScheme scheme) {
  if (k < 1) {
    throw ParameterError("rank weights need k >= 1");
  }
  RankWeights w;
  w.scheme = scheme;
  w.raw.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double r = static_cast<double>(k - i);  // r = [k, k-1, ..., 1]
    switch (scheme) {
      case WeightScheme::kLogarithmic:
        w.raw[i] = std::log1p(r);
        break;
      case WeightScheme::kLinear:
        w.raw[i] = r;
        break;
      case WeightScheme::kExponential:
        w.raw[i] = std::exp(r - static_cast<double>(k));
        break;
      case WeightScheme::kUniform:
        w.raw[i] = 1.0;
        break;
    }
  }
  w.total = 0.0;
  for (double v : w.raw) w.total += v;
  w.weights.resize(k);
  for (std::size_t i = 0; i < k; ++i) w.weights[i] = w.raw[i] / w.total;
  return w;
}

Decision orca_b(const RankedTopK& topk, std::size_t num_categories,
                std::size_t k) {
  if (topk.size() != k) {
    throw ParameterError("top-k ranking has " + std::to_string(topk.size()) +
                         " entries, expected " + std::to_string(k));
  }
  check_topk(topk, num_categories);
  std::vector<std::size_t> count(num_categories, 0);
  for (const auto& e : topk) ++count[e.category_index];
  const std::size_t best = pick_category(count, first_rank(topk, num_categories));
  return {best, static_cast<double>(count[best]) / static_cast<double>(k)};
}

Decision orca_b(const RankedTopK& topk, const ConceptCatalog& catalog,
                std::size_t k) {
  return orca_b(topk, catalog.num_categories(), k);
}

std::vector<double> orca_r_scores(const RankedTopK& topk,
                                  const RankWeights& weights,
                                  std::size_t num_categories) {
  if (weights.size() != topk.size()) {
    throw ParameterError("rank weights have " + std::to_string(weights.size()) +
                         " entries but the ranking has " +
                         std::to_string(topk.size()));
  }
  check_topk(topk, num_categories);
  std::vector<double> raw(num_categories, 0.0);
  for (std::size_t r = 0; r < topk.size(); ++r) {
    raw[topk[r].category_index] += weights.raw[r];
  }
  for (double& s : raw) s /= weights.total;
  return raw;
}

Decision orca_r(const RankedTopK& topk, const RankWeights& weights,
                std::size_t num_categories) {
  const auto score = orca_r_scores(topk, weights, num_categories);
  const std::size_t best = pick_category(score, first_rank(topk, num_categories));
  return {best, score[best]};
}

Decision orca_r(const RankedTopK& topk, const RankWeights& weights,
                const ConceptCatalog& catalog) {
  return orca_r(topk, weights, catalog.num_categories());
}

}  // namespace orca
