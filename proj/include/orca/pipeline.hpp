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
#include <string>
#include <string_view>
#include <vector>

#include "orca/bundle.hpp"
#include "orca/metrics.hpp"
#include "orca/orca.hpp"
#include "orca/scorers.hpp"
#include "orca/similarity.hpp"

namespace orca {

// A predictor/CSF pair from the baseline grid, or one of the two ORCA
// variants.
struct Method {
  enum class Family { kBaseline, kOrcaB, kOrcaR };

  Family family = Family::kBaseline;
  Predictor predictor = Predictor::kZeroShot;
  Csf csf = Csf::kMsp;

  static Method baseline(Predictor p, Csf c) {
    return {Family::kBaseline, p, c};
  }
  static Method orca_b() { return {Family::kOrcaB, {}, {}}; }
  static Method orca_r() { return {Family::kOrcaR, {}, {}}; }

  // "zero-shot+msp", "descclip+doctor", "orca-b", "orca-r", ...
  std::string tag() const;

  friend bool operator==(const Method&, const Method&) = default;
};

// Expands predictor/variant names ("zero-shot", "ensemble", "descclip",
// "orca-b", "orca-r") and CSF names ("msp", "odin", "doctor") into the
// method list: each baseline predictor crossed with every CSF, in the given
// order, followed by the ORCA variants. Duplicates are rejected.
std::vector<Method> expand_methods(const std::vector<std::string>& methods,
                                   const std::vector<std::string>& csfs);

// Default method list for a bundle: the full baseline grid (ensemble only
// when templates are present) plus both ORCA variants.
std::vector<std::string> default_method_names(const DatasetBundle& bundle);
std::vector<std::string> default_csf_names();

struct EvalOptions {
  std::vector<Method> methods;
  std::optional<std::size_t> rank_depth;  // defaults to K
  WeightScheme scheme = WeightScheme::kLogarithmic;
  double odin_temperature = kDefaultOdinTemperature;
  double tau = 0.5;
  unsigned workers = 0;  // 0 = hardware concurrency
};

// Resolved ranking depth; throws ParameterError if outside [1, C x K].
std::size_t resolve_rank_depth(const DatasetBundle& bundle,
                               const EvalOptions& options);

// Per-sample scorer with cached text norms. Holds references into the
// bundle, which must outlive it.
class SampleScorer {
 public:
  SampleScorer(const DatasetBundle& bundle, const EvalOptions& options);

  struct SampleLogits {
    std::optional<LogitVector> zero_shot;
    std::optional<LogitVector> ensemble;
    std::optional<LogitVector> concepts;  // length C x K
  };

  SampleLogits logits(std::size_t sample) const;
  // Scores one sample under `method`, reusing already computed logits.
  Decision score(const Method& method, const SampleLogits& logits) const;

  std::size_t rank_depth() const { return rank_depth_; }
  const RankWeights& weights() const { return weights_; }

 private:
  const DatasetBundle& bundle_;
  EvalOptions options_;
  std::size_t rank_depth_;
  RankWeights weights_;
  bool need_zero_shot_ = false;
  bool need_ensemble_ = false;
  bool need_concepts_ = false;
  TextBank categories_;
  TextBank concepts_;
  std::vector<TextBank> templates_;
};

struct MethodResult {
  Method method;
  std::vector<PredictionRecord> records;  // sorted by sample_index
  MetricTriple metrics;
  std::size_t detected = 0;  // records with confidence < tau
};

struct EvalResults {
  std::vector<MethodResult> methods;
  std::size_t rank_depth = 0;
  EvalOptions options;
};

// Scores every sample under every configured method. Samples are processed
// in parallel chunks; results are merged in sample order, so output does not
// depend on the worker count.
EvalResults evaluate(const DatasetBundle& bundle, const EvalOptions& options);

std::vector<ScoredOutcome> outcomes_of(const MethodResult& result);

}  // namespace orca
