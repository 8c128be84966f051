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
#include <optional>
#include <span>

#include "orca/scorers.hpp"

namespace orca {

// A confidence score paired with whether the underlying prediction was
// correct. Correct predictions are the positive class throughout.
struct ScoredOutcome {
  double confidence = 0.0;
  bool correct = false;
};

// AUROC of separating correct from incorrect predictions by confidence.
// Mann-Whitney form: fraction of (correct, incorrect) pairs where the correct
// one scores strictly higher, with ties counted as one half. Computed from
// mid-ranks after one sort, using integer arithmetic for the rank sums so
// the result is identical to the O(n^2) pair count.
// Throws UndefinedMetricError if either class is empty, InputError on a
// non-finite confidence.
double auroc(std::span<const ScoredOutcome> outcomes);

// False-positive rate at the largest threshold tau (taken from the observed
// confidences) such that |{correct : conf >= tau}| / n_correct >= tpr_level.
// No interpolation between thresholds.
// Throws UndefinedMetricError if either class is empty and ParameterError
// unless 0 < tpr_level <= 1.
double fpr_at_tpr(std::span<const ScoredOutcome> outcomes,
                  double tpr_level = 0.95);

// Fraction of records whose prediction equals the label. Throws
// ValidationError on a length mismatch or empty input.
double accuracy(std::span<const PredictionRecord> records,
                std::span<const int> labels);

enum class GateDecision { kAccept, kDetect };

// Accept iff confidence >= tau.
inline GateDecision gate(double confidence, double tau) {
  return confidence >= tau ? GateDecision::kAccept : GateDecision::kDetect;
}

// All three metrics for one method, as fractions. auroc and fpr_at_95tpr are
// empty when the outcomes contain a single class.
struct MetricTriple {
  std::optional<double> auroc;
  std::optional<double> fpr_at_95tpr;
  double accuracy = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_incorrect = 0;
};

MetricTriple evaluate_outcomes(std::span<const ScoredOutcome> outcomes);

}  // namespace orca
