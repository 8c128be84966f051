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

// Brute-force reference implementations used only by tests. None of these
// call into the library's metric, ranking or ORCA code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "orca/metrics.hpp"

namespace orca::oracle {

// O(n^2) Mann-Whitney count over all (correct, incorrect) pairs.
inline double pairwise_auroc(const std::vector<ScoredOutcome>& outcomes) {
  std::uint64_t greater = 0;
  std::uint64_t ties = 0;
  std::uint64_t pos = 0;
  std::uint64_t neg = 0;
  for (const auto& o : outcomes) (o.correct ? pos : neg)++;
  for (const auto& p : outcomes) {
    if (!p.correct) continue;
    for (const auto& n : outcomes) {
      if (n.correct) continue;
      if (p.confidence > n.confidence) {
        ++greater;
      } else if (p.confidence == n.confidence) {
        ++ties;
      }
    }
  }
  return static_cast<double>(2 * greater + ties) /
         (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

// Evaluates TPR at every distinct observed confidence and returns the FPR at
// the largest one whose TPR reaches `level`.
inline double scan_fpr_at_tpr(const std::vector<ScoredOutcome>& outcomes,
                              double level) {
  std::set<double> thresholds;
  std::size_t pos = 0;
  std::size_t neg = 0;
  for (const auto& o : outcomes) {
    thresholds.insert(o.confidence);
    (o.correct ? pos : neg)++;
  }
  bool found = false;
  double best = 0.0;
  for (double t : thresholds) {
    std::size_t tp = 0;
    for (const auto& o : outcomes) {
      if (o.correct && o.confidence >= t) ++tp;
    }
    if (static_cast<double>(tp) / static_cast<double>(pos) >= level) {
      if (!found || t > best) best = t;
      found = true;
    }
  }
  std::size_t fp = 0;
  for (const auto& o : outcomes) {
    if (!o.correct && o.confidence >= best) ++fp;
  }
  return static_cast<double>(fp) / static_cast<double>(neg);
}

// Full stable sort of (score desc, index asc); returns the first k indices.
inline std::vector<std::size_t> sorted_prefix(const std::vector<double>& scores,
                                              std::size_t k) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < scores.size(); ++i) all.emplace_back(scores[i], i);
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.first > b.first;
  });
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < k; ++r) out.push_back(all[r].second);
  return out;
}

struct OracleDecision {
  std::size_t prediction;
  double confidence;
};

// For each category separately: count its members in the ranking, and find
// its best rank. Winner = larger count, then earlier best rank.
inline OracleDecision count_categories(const std::vector<std::size_t>& ranked_cats,
                                       std::size_t num_categories) {
  std::size_t best = 0;
  std::size_t best_count = 0;
  std::size_t best_first = ranked_cats.size();
  for (std::size_t c = 0; c < num_categories; ++c) {
    std::size_t count = 0;
    std::size_t first = ranked_cats.size();
    for (std::size_t r = 0; r < ranked_cats.size(); ++r) {
      if (ranked_cats[r] == c) {
        ++count;
        first = std::min(first, r);
      }
    }
    if (count > best_count || (count == best_count && first < best_first)) {
      best = c;
      best_count = count;
      best_first = first;
    }
  }
  return {best, static_cast<double>(best_count) /
                    static_cast<double>(ranked_cats.size())};
}

// Per-category weighted sum: sum of raw[r] over ranks r owned by c (in rank
// order), divided by the raw total. Same tie rule as count_categories.
inline OracleDecision weighted_categories(
    const std::vector<std::size_t>& ranked_cats, const std::vector<double>& raw,
    double raw_total, std::size_t num_categories) {
  std::size_t best = 0;
  double best_score = -1.0;
  std::size_t best_first = ranked_cats.size();
  for (std::size_t c = 0; c < num_categories; ++c) {
    double sum = 0.0;
    std::size_t first = ranked_cats.size();
    for (std::size_t r = 0; r < ranked_cats.size(); ++r) {
      if (ranked_cats[r] == c) {
        sum += raw[r];
        first = std::min(first, r);
      }
    }
    const double score = sum / raw_total;
    if (score > best_score || (score == best_score && first < best_first)) {
      best = c;
      best_score = score;
      best_first = first;
    }
  }
  return {best, best_score};
}

// Closed-form rank weights, r = k, k-1, ..., 1.
inline std::vector<double> closed_form_log_weights(std::size_t k) {
  double total = 0.0;
  for (std::size_t r = 1; r <= k; ++r) total += std::log(1.0 + static_cast<double>(r));
  std::vector<double> w;
  for (std::size_t i = 0; i < k; ++i) {
    w.push_back(std::log(1.0 + static_cast<double>(k - i)) / total);
  }
  return w;
}

// 100 * cosine computed independently of the library kernel.
inline double cosine_logit(const std::vector<double>& a,
                           const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(100.0L * dot / std::sqrt(na * nb));
}

}  // namespace orca::oracle
