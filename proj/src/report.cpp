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

#include "orca/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>

#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/fs.hpp"

namespace orca {

using nlohmann::json;

namespace {

json percent_or_null(const std::optional<double>& v) {
  if (!v) return nullptr;
  return *v * 100.0;
}

// Full-precision rendering for per-sample values, so printed confidences are
// the exact doubles the metrics consumed.
std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CandidatePool pool_for(const DatasetBundle& bundle) {
  if (bundle.candidate_pool) return *bundle.candidate_pool;
  return CandidatePool{bundle.catalog.categories(),
                       bundle.concept_text_embeddings};
}

}  // namespace

std::size_t InterpretationReport::distinct_concept_categories() const {
  std::set<std::size_t> cats;
  for (const auto& c : top_concepts) cats.insert(c.category);
  return cats.size();
}

std::size_t InterpretationReport::concepts_from_true_category() const {
  return static_cast<std::size_t>(
      std::count_if(top_concepts.begin(), top_concepts.end(),
                    [&](const ConceptScore& c) {
                      return c.category == static_cast<std::size_t>(true_label);
                    }));
}

InterpretationReport interpret_sample(const DatasetBundle& bundle,
                                      std::size_t sample,
                                      const EvalOptions& options) {
  if (sample >= bundle.num_samples()) {
    throw ParameterError("sample index " + std::to_string(sample) +
                         " out of range for " +
                         std::to_string(bundle.num_samples()) + " samples");
  }
  // Always score zero-shot and concepts, whatever the method list says.
  EvalOptions scoring = options;
  scoring.methods.push_back(Method::baseline(Predictor::kZeroShot, Csf::kMsp));
  scoring.methods.push_back(Method::orca_b());
  const SampleScorer scorer(bundle, scoring);
  const auto logits = scorer.logits(sample);

  InterpretationReport r;
  r.sample_index = sample;
  r.true_label = bundle.labels[sample];
  r.true_name = bundle.category_names[static_cast<std::size_t>(r.true_label)];

  for (const auto& m : options.methods) {
    const Decision d = scorer.score(m, logits);
    r.predictions.push_back({m.tag(), d.prediction,
                             bundle.category_names[d.prediction], d.confidence,
                             d.prediction ==
                                 static_cast<std::size_t>(r.true_label)});
  }

  const auto probs = softmax(*logits.zero_shot, 1.0);
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return probs[a] > probs[b];
                   });
  const std::size_t n_cat = std::min(kReportTopCategories, probs.size());
  for (std::size_t i = 0; i < n_cat; ++i) {
    r.top_categories.push_back(
        {order[i], bundle.category_names[order[i]], probs[order[i]]});
  }

  const std::size_t n_con =
      std::min(kReportTopConcepts, bundle.catalog.num_concepts());
  const auto top = top_k_concepts(*logits.concepts,
                                  bundle.concepts_per_category(), n_con);
  for (const auto& e : top) {
    r.top_concepts.push_back({e.concept_index,
                              bundle.catalog.concept_name(e.concept_index),
                              e.category_index,
                              bundle.category_names[e.category_index],
                              e.score});
  }
  return r;
}

std::string interpretation_to_json(
    const std::vector<InterpretationReport>& reports) {
  auto doc = json::array();
  for (const auto& r : reports) {
    json j;
    j["sample"] = r.sample_index;
    j["true_label"] = r.true_label;
    j["true_name"] = r.true_name;
    j["predictions"] = json::array();
    for (const auto& p : r.predictions) {
      j["predictions"].push_back({{"method", p.method},
                                  {"predicted", p.predicted_category},
                                  {"predicted_name", p.predicted_name},
                                  {"confidence", p.confidence},
                                  {"correct", p.correct}});
    }
    j["top_categories"] = json::array();
    for (const auto& c : r.top_categories) {
      j["top_categories"].push_back({{"category", c.category},
                                     {"name", c.name},
                                     {"probability", c.probability}});
    }
    j["top_concepts"] = json::array();
    for (const auto& c : r.top_concepts) {
      j["top_concepts"].push_back({{"concept_index", c.concept_index},
                                   {"concept", c.concept_name},
                                   {"category", c.category},
                                   {"category_name", c.category_name},
                                   {"similarity", c.score}});
    }
    j["distinct_concept_categories"] = r.distinct_concept_categories();
    j["concepts_from_true_category"] = r.concepts_from_true_category();
    doc.push_back(std::move(j));
  }
  return doc.dump(2) + "\n";
}

RunMetadata metadata_for(const DatasetBundle& bundle) {
  RunMetadata m;
  m.dataset_id = bundle.dataset_id;
  m.backbone_id = bundle.backbone_id;
  return m;
}

std::string format_percent(std::optional<double> fraction) {
  if (!fraction) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *fraction * 100.0);
  return buf;
}

std::string eval_report_json(const DatasetBundle& bundle,
                             const EvalResults& results,
                             const RunMetadata& metadata) {
  json meta;
  meta["dataset"] = metadata.dataset_id;
  meta["backbone"] = metadata.backbone_id;
  meta["num_samples"] = bundle.num_samples();
  meta["num_categories"] = bundle.num_categories();
  meta["concepts_per_category"] = bundle.concepts_per_category();
  meta["rank_depth"] = results.rank_depth;
  meta["weighting_scheme"] = std::string(to_string(results.options.scheme));
  meta["odin_temperature"] = results.options.odin_temperature;
  meta["tau"] = results.options.tau;
  meta["selection_split"] = metadata.selection_split;
  meta["tie_rules"] = {
      {"argmax", "lowest category index"},
      {"top_k", "higher score first, then lower global concept index"},
      {"orca", "category whose best concept ranks highest"},
      {"auroc", "ties count one half"},
      {"fpr95", "largest observed threshold with TPR >= 0.95, no "
                "interpolation"}};
  meta["tensor_format_version"] = kTensorFormatVersion;
  meta["report_format_version"] = kReportFormatVersion;
  meta["config"] = metadata.config;

  json methods = json::array();
  for (const auto& r : results.methods) {
    methods.push_back({{"method", r.method.tag()},
                       {"auroc", percent_or_null(r.metrics.auroc)},
                       {"fpr95", percent_or_null(r.metrics.fpr_at_95tpr)},
                       {"acc", r.metrics.accuracy * 100.0},
                       {"n_correct", r.metrics.n_correct},
                       {"n_incorrect", r.metrics.n_incorrect},
                       {"detected_at_tau", r.detected}});
  }
  json doc = {{"metadata", meta}, {"methods", methods}};
  return doc.dump(2) + "\n";
}

std::string eval_report_csv(const EvalResults& results) {
  std::string out = "method,auroc,fpr95,acc\n";
  for (const auto& r : results.methods) {
    out += r.method.tag() + "," + format_percent(r.metrics.auroc) + "," +
           format_percent(r.metrics.fpr_at_95tpr) + "," +
           format_percent(r.metrics.accuracy) + "\n";
  }
  return out;
}

std::string records_csv(const EvalResults& results) {
  std::string out = "sample,method,predicted,confidence,correct,decision\n";
  for (const auto& r : results.methods) {
    for (const auto& rec : r.records) {
      const bool accept =
          gate(rec.confidence, results.options.tau) == GateDecision::kAccept;
      out += std::to_string(rec.sample_index) + "," + rec.method + "," +
             std::to_string(rec.predicted_category) + "," +
             exact(rec.confidence) + "," + (rec.correct ? "1" : "0") + "," +
             (accept ? "accept" : "detect") + "\n";
    }
  }
  return out;
}

ReportPaths emit_eval_report(const DatasetBundle& bundle,
                             const EvalResults& results,
                             const RunMetadata& metadata,
                             const std::filesystem::path& out_dir) {
  ReportPaths paths{out_dir / "report.json", out_dir / "metrics.csv"};
  // Render both documents before touching the filesystem.
  const std::string json_text = eval_report_json(bundle, results, metadata);
  const std::string csv_text = eval_report_csv(results);
  write_file_atomic(paths.json, json_text);
  write_file_atomic(paths.csv, csv_text);
  return paths;
}

std::vector<SweepRow> ablation_sweep(const DatasetBundle& bundle,
                                     const SweepOptions& options) {
  if (options.k_values.empty()) {
    throw ConfigurationError("sweep needs at least one k value");
  }
  bool want_orca_r = false;
  for (const auto& m : options.methods) {
    if (m != "orca-r" && m != "orca-b" && m != "descclip+msp") {
      throw ConfigurationError("sweep method '" + m +
                               "' not supported (orca-r, orca-b, descclip+msp)");
    }
    want_orca_r = want_orca_r || m == "orca-r";
  }
  if (want_orca_r && options.schemes.empty()) {
    throw ConfigurationError("sweep over orca-r needs at least one scheme");
  }

  const CandidatePool pool = pool_for(bundle);
  std::size_t smallest = pool.categories.front().concepts.size();
  for (const auto& c : pool.categories) {
    smallest = std::min(smallest, c.concepts.size());
  }

  const EmbeddingMatrix* sel_images = &bundle.image_embeddings;
  const std::vector<int>* sel_labels = &bundle.labels;
  if (options.selection_split != "eval") {
    const auto it = bundle.splits.find(options.selection_split);
    if (it == bundle.splits.end()) {
      throw ConfigurationError("selection split '" + options.selection_split +
                               "' is not defined in the manifest");
    }
    sel_images = &it->second.images;
    sel_labels = &it->second.labels;
  }

  DatasetBundle working = bundle;
  std::vector<SweepRow> rows;
  for (std::size_t k : options.k_values) {
    if (k < 1 || k > smallest) {
      throw ValidationError("sweep k = " + std::to_string(k) +
                            " exceeds the candidate pool (smallest category "
                            "has " + std::to_string(smallest) + ")");
    }
    auto selected = select_top_concepts(pool, *sel_images, *sel_labels, k);
    working.catalog = std::move(selected.catalog);
    working.concept_text_embeddings = std::move(selected.embeddings);

    for (const auto& name : options.methods) {
      EvalOptions eval;
      eval.rank_depth = k;
      eval.odin_temperature = options.odin_temperature;
      eval.workers = options.workers;
      if (name == "orca-r") {
        eval.methods = {Method::orca_r()};
        for (WeightScheme s : options.schemes) {
          eval.scheme = s;
          const auto res = evaluate(working, eval);
          rows.push_back({k, std::string(to_string(s)), name,
                          res.methods.front().metrics});
        }
        continue;
      }
      eval.methods = {name == "orca-b"
                          ? Method::orca_b()
                          : Method::baseline(Predictor::kDescClip, Csf::kMsp)};
      const auto res = evaluate(working, eval);
      rows.push_back({k, "-", name, res.methods.front().metrics});
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "k,scheme,method,auroc,fpr95,acc\n";
  for (const auto& r : rows) {
    out += std::to_string(r.k) + "," + r.scheme + "," + r.method + "," +
           format_percent(r.metrics.auroc) + "," +
           format_percent(r.metrics.fpr_at_95tpr) + "," +
           format_percent(r.metrics.accuracy) + "\n";
  }
  return out;
}

}  // namespace orca
