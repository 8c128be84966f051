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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "orca/bundle.hpp"
#include "orca/pipeline.hpp"

namespace orca {

inline constexpr std::size_t kReportTopCategories = 3;
inline constexpr std::size_t kReportTopConcepts = 10;
inline constexpr int kReportFormatVersion = 1;

struct MethodPrediction {
  std::string method;
  std::size_t predicted_category = 0;
  std::string predicted_name;
  double confidence = 0.0;
  bool correct = false;
};

struct CategoryScore {
  std::size_t category = 0;
  std::string name;
  double probability = 0.0;
};

struct ConceptScore {
  std::size_t concept_index = 0;
  std::string concept_name;
  std::size_t category = 0;
  std::string category_name;
  double score = 0.0;
};

// Why-did-it-fail view of one sample: the zero-shot top categories, the
// strongest concepts with their owning categories, and each method's call.
struct InterpretationReport {
  std::size_t sample_index = 0;
  int true_label = 0;
  std::string true_name;
  std::vector<MethodPrediction> predictions;
  std::vector<CategoryScore> top_categories;  // zero-shot softmax, T = 1
  std::vector<ConceptScore> top_concepts;

  // Number of distinct owning categories among top_concepts.
  std::size_t distinct_concept_categories() const;
  // How many of top_concepts belong to the true category.
  std::size_t concepts_from_true_category() const;
};

InterpretationReport interpret_sample(const DatasetBundle& bundle,
                                      std::size_t sample,
                                      const EvalOptions& options);

std::string interpretation_to_json(const std::vector<InterpretationReport>&);

// Provenance echoed into every report. `config` holds the effective CLI
// configuration as key/value strings.
struct RunMetadata {
  std::string dataset_id;
  std::string backbone_id;
  std::string selection_split = "none";
  std::map<std::string, std::string> config;
};

RunMetadata metadata_for(const DatasetBundle& bundle);

// Structured report (JSON, percentages) and flat table with header
// "method,auroc,fpr95,acc" and values as percentages with two decimals.
std::string eval_report_json(const DatasetBundle& bundle,
                             const EvalResults& results,
                             const RunMetadata& metadata);
std::string eval_report_csv(const EvalResults& results);
// Per-sample records: sample,method,predicted,confidence,correct,decision.
std::string records_csv(const EvalResults& results);

struct ReportPaths {
  std::filesystem::path json;
  std::filesystem::path csv;
};

// Writes report.json and metrics.csv into `out_dir` (created if missing).
ReportPaths emit_eval_report(const DatasetBundle& bundle,
                             const EvalResults& results,
                             const RunMetadata& metadata,
                             const std::filesystem::path& out_dir);

struct SweepRow {
  std::size_t k = 0;
  std::string scheme;  // "-" for methods that ignore the weighting scheme
  std::string method;
  MetricTriple metrics;
};

struct SweepOptions {
  std::vector<std::size_t> k_values;
  std::vector<WeightScheme> schemes;
  // Subset of "orca-r", "orca-b", "descclip+msp". ORCA-R gets one row per
  // scheme, the others one row per k.
  std::vector<std::string> methods = {"orca-r"};
  // Name of the split feeding concept selection; "eval" means the
  // evaluation images themselves.
  std::string selection_split = "eval";
  double odin_temperature = kDefaultOdinTemperature;
  unsigned workers = 0;
};

// For each k, re-selects k concepts per category from the candidate pool
// (the bundle's own catalog when it has none) and evaluates the requested
// methods at ranking depth k. Throws ValidationError when k exceeds a
// category's candidate count.
std::vector<SweepRow> ablation_sweep(const DatasetBundle& bundle,
                                     const SweepOptions& options);

// Header "k,scheme,method,auroc,fpr95,acc".
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Two-decimal percentage, "nan" for undefined metrics.
std::string format_percent(std::optional<double> fraction);

}  // namespace orca
