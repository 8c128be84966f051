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

#include "orca/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "orca/errors.hpp"

namespace orca {

namespace {

struct ClassCounts {
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

ClassCounts count_classes(std::span<const ScoredOutcome> outcomes,
                          const char* metric) {
  ClassCounts n;
  for (const auto& o : outcomes) {
    if (!std::isfinite(o.confidence)) {
      throw InputError(std::string(metric) + ": non-finite confidence");
    }
    (o.correct ? n.positives : n.negatives)++;
  }
  if (n.positives == 0 || n.negatives == 0) {
    throw UndefinedMetricError(
        std::string(metric) +
        " is undefined without both correct and incorrect predictions (" +
        std::to_string(n.positives) + " correct, " +
        std::to_string(n.negatives) + " incorrect)");
  }
  return n;
}

}  // namespace

double auroc(std::span<const ScoredOutcome> outcomes) {
  const ClassCounts n = count_classes(outcomes, "AUROC");

  std::vector<std::size_t> order(outcomes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return outcomes[a].confidence < outcomes[b].confidence;
  });

  // Twice the rank sum of the positives, where a tie group spanning 1-based
  // ranks [lo, hi] gives each member the mid-rank (lo + hi) / 2.
  std::uint64_t rank_sum_x2 = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() &&
           outcomes[order[j]].confidence == outcomes[order[i]].confidence) {
      ++j;
    }
    std::uint64_t positives_in_group = 0;
    for (std::size_t t = i; t < j; ++t) {
      if (outcomes[order[t]].correct) ++positives_in_group;
    }
    const std::uint64_t lo = i + 1;
    const std::uint64_t hi = j;
    rank_sum_x2 += positives_in_group * (lo + hi);
    i = j;
  }
  // 2U = 2 * rank sum - n1 (n1 + 1); ties count one half in U.
  const std::uint64_t n1 = n.positives;
  const std::uint64_t u_x2 = rank_sum_x2 - n1 * (n1 + 1);
  return static_cast<double>(u_x2) /
         (2.0 * static_cast<double>(n.positives) *
          static_cast<double>(n.negatives));
}

double fpr_at_tpr(std::span<const ScoredOutcome> outcomes, double tpr_level) {
  if (!(tpr_level > 0.0 && tpr_level <= 1.0)) {
    throw ParameterError("TPR level must lie in (0, 1], got " +
                         std::to_string(tpr_level));
  }
  const ClassCounts n = count_classes(outcomes, "FPR@TPR");

  std::vector<double> pos;
  std::vector<double> neg;
  pos.reserve(n.positives);
  neg.reserve(n.negatives);
  for (const auto& o : outcomes) {
    (o.correct ? pos : neg).push_back(o.confidence);
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  // Accepting the top `m` positives reaches the level for the smallest m with
  // m / n_pos >= level. The m-th largest positive confidence is then the
  // largest threshold that keeps TPR at or above the level: any larger
  // threshold admits at most m - 1 positives.
  const double n_pos = static_cast<double>(n.positives);
  std::size_t m = 1;
  while (static_cast<double>(m) / n_pos < tpr_level) ++m;
  const double tau = pos[m - 1];

  const auto accepted_neg = static_cast<std::size_t>(
      std::upper_bound(neg.begin(), neg.end(), tau, std::greater<>()) -
      neg.begin());
  return static_cast<double>(accepted_neg) /
         static_cast<double>(n.negatives);
}

double accuracy(std::span<const PredictionRecord> records,
                std::span<const int> labels) {
  if (records.size() != labels.size()) {
    throw ValidationError("accuracy: " + std::to_string(records.size()) +
                          " records but " + std::to_string(labels.size()) +
                          " labels");
  }
  if (records.empty()) {
    throw ValidationError("accuracy of an empty record list");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (labels[i] >= 0 &&
        records[i].predicted_category == static_cast<std::size_t>(labels[i])) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

MetricTriple evaluate_outcomes(std::span<const ScoredOutcome> outcomes) {
  MetricTriple m;
  for (const auto& o : outcomes) (o.correct ? m.n_correct : m.n_incorrect)++;
  const std::size_t total = m.n_correct + m.n_incorrect;
  m.accuracy = total == 0 ? 0.0
                          : static_cast<double>(m.n_correct) /
                                static_cast<double>(total);
  if (m.n_correct > 0 && m.n_incorrect > 0) {
    m.auroc = auroc(outcomes);
    m.fpr_at_95tpr = fpr_at_tpr(outcomes, 0.95);
  }
  return m;
}

}  // namespace orca
