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

// orca: failure detection for zero-shot vision-language classifiers.
//
//   orca synth           --out DIR [--seed N ...]
//   orca evaluate        --manifest M --out DIR
//   orca interpret       --manifest M --samples 3,17 --out DIR
//   orca sweep           --manifest M --k-values 5,10,20 --out DIR
//   orca select-concepts --manifest M --concepts K --out DIR
//   orca convert         --input A --output B [--normalize]
//
// Exit status: 0 success, 2 configuration or input error, 3 I/O error,
// 4 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "orca/bundle.hpp"
#include "orca/errors.hpp"
#include "orca/fs.hpp"
#include "orca/pipeline.hpp"
#include "orca/report.hpp"
#include "orca/similarity.hpp"
#include "orca/synth.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitInternal = 4;

struct CommonFlags {
  std::string manifest;
  std::vector<std::string> methods;
  std::vector<std::string> csfs;
  std::size_t rank_depth = 0;  // 0 = K
  std::string scheme = "logarithmic";
  double odin_temp = orca::kDefaultOdinTemperature;
  double tau = 0.5;
  std::string selection_split = "none";
  std::string out;
  unsigned workers = 0;
  std::uint64_t seed = 0;
};

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += v[i];
  }
  return out;
}

void add_manifest_flag(CLI::App* app, CommonFlags& f) {
  app->add_option("--manifest", f.manifest, "Dataset manifest (JSON)")
      ->required();
}

void add_scoring_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--methods", f.methods,
                  "Predictors and variants: zero-shot,ensemble,descclip,"
                  "orca-b,orca-r")
      ->delimiter(',');
  app->add_option("--csfs", f.csfs, "Baseline CSFs: msp,odin,doctor")
      ->delimiter(',');
  app->add_option("--rank-depth", f.rank_depth,
                  "Top-k depth for ORCA (default: concepts per category)");
  app->add_option("--scheme", f.scheme,
                  "ORCA-R weighting: logarithmic, linear, exponential, uniform")
      ->capture_default_str();
  app->add_option("--odin-temp", f.odin_temp, "ODIN softmax temperature")
      ->capture_default_str();
  app->add_option("--tau", f.tau, "Accept/detect threshold")
      ->capture_default_str();
  app->add_option("--workers", f.workers,
                  "Worker threads (0 = available parallelism)")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Seed (recorded; scoring is deterministic)")
      ->capture_default_str();
}

orca::EvalOptions eval_options(const orca::DatasetBundle& bundle,
                               CommonFlags& f) {
  if (f.methods.empty()) f.methods = orca::default_method_names(bundle);
  if (f.csfs.empty()) f.csfs = orca::default_csf_names();
  orca::EvalOptions o;
  o.methods = orca::expand_methods(f.methods, f.csfs);
  if (f.rank_depth > 0) o.rank_depth = f.rank_depth;
  o.scheme = orca::parse_weight_scheme(f.scheme);
  o.odin_temperature = f.odin_temp;
  o.tau = f.tau;
  o.workers = f.workers;
  return o;
}

std::map<std::string, std::string> effective_config(const CommonFlags& f) {
  return {{"manifest", f.manifest},
          {"methods", join(f.methods)},
          {"csfs", join(f.csfs)},
          {"rank_depth", f.rank_depth ? std::to_string(f.rank_depth) : "K"},
          {"scheme", f.scheme},
          {"odin_temp", std::to_string(f.odin_temp)},
          {"tau", std::to_string(f.tau)},
          {"selection_split", f.selection_split},
          {"seed", std::to_string(f.seed)}};
}

int run_evaluate(CommonFlags& f, bool write_records) {
  const auto bundle = orca::load_manifest(f.manifest);
  const auto options = eval_options(bundle, f);
  const auto results = orca::evaluate(bundle, options);

  auto meta = orca::metadata_for(bundle);
  meta.selection_split = f.selection_split;
  meta.config = effective_config(f);
  // Workers do not change results, so they are left out of the report.
  const auto paths = orca::emit_eval_report(bundle, results, meta, f.out);
  if (write_records) {
    orca::write_file_atomic(fs::path(f.out) / "records.csv",
                            orca::records_csv(results));
  }
  std::cout << orca::eval_report_csv(results);
  std::cerr << "wrote " << paths.json.string() << " and " << paths.csv.string()
            << "\n";
  return 0;
}

int run_interpret(CommonFlags& f, std::vector<std::size_t> samples,
                  const std::string& failures_of, std::size_t limit) {
  const auto bundle = orca::load_manifest(f.manifest);
  const auto options = eval_options(bundle, f);

  if (!failures_of.empty()) {
    // Pick the first `limit` misclassified samples of the given method.
    const auto results = orca::evaluate(bundle, options);
    const orca::MethodResult* chosen = nullptr;
    for (const auto& r : results.methods) {
      if (r.method.tag() == failures_of) chosen = &r;
    }
    if (!chosen) {
      throw orca::ConfigurationError("--failures-of '" + failures_of +
                                     "' is not among the configured methods");
    }
    for (const auto& rec : chosen->records) {
      if (samples.size() >= limit) break;
      if (!rec.correct) samples.push_back(rec.sample_index);
    }
  }
  if (samples.empty()) {
    throw orca::ConfigurationError("no samples selected (use --samples or "
                                   "--failures-of)");
  }
  std::vector<orca::InterpretationReport> reports;
  for (std::size_t s : samples) {
    reports.push_back(orca::interpret_sample(bundle, s, options));
  }
  const fs::path path = fs::path(f.out) / "interpretation.json";
  orca::write_file_atomic(path, orca::interpretation_to_json(reports));
  for (const auto& r : reports) {
    std::cout << "sample " << r.sample_index << " (" << r.true_name
              << "): top concepts span " << r.distinct_concept_categories()
              << " categories, " << r.concepts_from_true_category() << "/"
              << r.top_concepts.size() << " from the true category\n";
  }
  std::cerr << "wrote " << path.string() << "\n";
  return 0;
}

int run_sweep(CommonFlags& f, std::vector<std::size_t> k_values,
              std::vector<std::string> schemes) {
  const auto bundle = orca::load_manifest(f.manifest);
  orca::SweepOptions o;
  o.k_values = std::move(k_values);
  for (const auto& s : schemes) o.schemes.push_back(orca::parse_weight_scheme(s));
  if (!f.methods.empty()) o.methods = f.methods;
  o.selection_split = f.selection_split == "none" ? "eval" : f.selection_split;
  o.odin_temperature = f.odin_temp;
  o.workers = f.workers;
  const auto rows = orca::ablation_sweep(bundle, o);
  const std::string csv = orca::sweep_csv(rows);
  const fs::path path = fs::path(f.out) / "sweep.csv";
  orca::write_file_atomic(path, csv);
  std::cout << csv;
  std::cerr << "wrote " << path.string() << " (selection split: "
            << o.selection_split << ")\n";
  return 0;
}

int run_select(CommonFlags& f, std::size_t k, const std::string& pool_catalog,
               const std::string& pool_embeddings) {
  auto bundle = orca::load_manifest(f.manifest);
  orca::CandidatePool pool;
  if (!pool_catalog.empty() || !pool_embeddings.empty()) {
    if (pool_catalog.empty() || pool_embeddings.empty()) {
      throw orca::ConfigurationError(
          "--pool-catalog and --pool-embeddings must be given together");
    }
    pool = orca::read_candidate_pool(pool_catalog, pool_embeddings);
  } else if (bundle.candidate_pool) {
    pool = *bundle.candidate_pool;
  } else {
    throw orca::ConfigurationError(
        "no candidate pool: pass --pool-catalog/--pool-embeddings or add "
        "candidate_pool to the manifest");
  }

  const std::string split =
      f.selection_split == "none" ? "eval" : f.selection_split;
  const orca::EmbeddingMatrix* images = &bundle.image_embeddings;
  const std::vector<int>* labels = &bundle.labels;
  if (split != "eval") {
    const auto it = bundle.splits.find(split);
    if (it == bundle.splits.end()) {
      throw orca::ConfigurationError("selection split '" + split +
                                     "' is not defined in the manifest");
    }
    images = &it->second.images;
    labels = &it->second.labels;
  }
  auto selected = orca::select_top_concepts(pool, *images, *labels, k);

  nlohmann::json info = {{"selection_split", split}, {"k", k}};
  info["categories"] = nlohmann::json::array();
  std::size_t row = 0;
  for (const auto& cat : selected.catalog.categories()) {
    nlohmann::json entry = {{"name", cat.name}};
    for (const auto& c : cat.concepts) {
      entry["concepts"].push_back(
          {{"concept", c}, {"mean_similarity", selected.mean_similarity[row++]}});
    }
    info["categories"].push_back(std::move(entry));
  }

  bundle.catalog = std::move(selected.catalog);
  bundle.concept_text_embeddings = std::move(selected.embeddings);
  bundle.candidate_pool = std::move(pool);
  const auto manifest = orca::write_bundle(bundle, f.out);
  orca::write_file_atomic(fs::path(f.out) / "selection.json", info.dump(2) + "\n");
  std::cerr << "wrote " << manifest.string() << "\n";
  return 0;
}

// Text form: one row per line, comma-separated floats.
orca::EmbeddingMatrix read_csv_matrix(const fs::path& path) {
  std::istringstream in(orca::read_file(path));
  std::string line;
  std::vector<float> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ls, cell, ',')) {
      try {
        data.push_back(std::stof(cell));
      } catch (const std::exception&) {
        throw orca::FormatError("bad number '" + cell + "' on row " +
                                std::to_string(rows) + " of " + path.string());
      }
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols) {
      throw orca::FormatError("row " + std::to_string(rows) + " of " +
                              path.string() + " has " + std::to_string(n) +
                              " values, expected " + std::to_string(cols));
    }
    ++rows;
  }
  return orca::EmbeddingMatrix(rows, cols, std::move(data), false);
}

std::string csv_of(const orca::EmbeddingMatrix& m) {
  std::string out;
  char buf[32];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(row[c]));
      if (c) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

int run_convert(const std::string& input, const std::string& output,
                bool normalize) {
  const bool csv_in = fs::path(input).extension() == ".csv";
  const bool csv_out = fs::path(output).extension() == ".csv";
  auto m = csv_in ? read_csv_matrix(input) : orca::read_matrix(input);
  if (normalize) {
    std::vector<float> data;
    data.reserve(m.rows() * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (double v : orca::l2_normalize(m.row(r))) {
        data.push_back(static_cast<float>(v));
      }
    }
    m = orca::EmbeddingMatrix(m.rows(), m.cols(), std::move(data), true);
  }
  if (csv_out) {
    orca::write_file_atomic(output, csv_of(m));
  } else {
    orca::write_matrix(m, output);
  }
  std::cerr << input << " -> " << output << " (" << m.rows() << "x" << m.cols()
            << (m.l2_normalized() ? ", l2-normalized" : "") << ")\n";
  return 0;
}

int run_synth(const orca::SynthConfig& cfg, const std::string& out) {
  const auto synth = orca::make_synthetic_bundle(cfg);
  const auto manifest = orca::write_bundle(synth.bundle, out);
  std::vector<int> planted(synth.planted_failure.begin(),
                           synth.planted_failure.end());
  orca::write_labels(planted, fs::path(out) / "planted_failures.json");
  std::cerr << "wrote " << manifest.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Failure detection for zero-shot vision-language classifiers"};
  app.set_config("--config", "", "TOML/INI file with flag defaults");
  app.require_subcommand(1);

  CommonFlags flags;

  auto* evaluate = app.add_subcommand("evaluate", "Score every method and report metrics");
  add_manifest_flag(evaluate, flags);
  add_scoring_flags(evaluate, flags);
  evaluate->add_option("--selection-split", flags.selection_split,
                       "Split that fed concept selection (recorded in the report)");
  evaluate->add_option("--out", flags.out, "Output directory")->required();
  bool write_records = false;
  evaluate->add_flag("--records", write_records, "Also write per-sample records.csv");

  auto* interpret = app.add_subcommand("interpret", "Explain individual predictions");
  add_manifest_flag(interpret, flags);
  add_scoring_flags(interpret, flags);
  interpret->add_option("--out", flags.out, "Output directory")->required();
  std::vector<std::size_t> samples;
  interpret->add_option("--samples", samples, "Sample indices")->delimiter(',');
  std::string failures_of;
  std::size_t failure_limit = 10;
  interpret->add_option("--failures-of", failures_of,
                        "Interpret misclassified samples of this method tag");
  interpret->add_option("--limit", failure_limit, "Maximum failures to report")
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "Ablation over k and weighting schemes");
  add_manifest_flag(sweep, flags);
  sweep->add_option("--methods", flags.methods, "orca-r,orca-b,descclip+msp")
      ->delimiter(',');
  std::vector<std::size_t> k_values;
  sweep->add_option("--k-values", k_values, "Concepts per category to try")
      ->delimiter(',')
      ->required();
  std::vector<std::string> schemes = {"logarithmic"};
  sweep->add_option("--schemes", schemes, "Weighting schemes for orca-r")
      ->delimiter(',');
  sweep->add_option("--selection-split", flags.selection_split,
                    "Image split for concept selection (default: eval)");
  sweep->add_option("--odin-temp", flags.odin_temp, "ODIN temperature");
  sweep->add_option("--workers", flags.workers, "Worker threads");
  sweep->add_option("--out", flags.out, "Output directory")->required();

  auto* select = app.add_subcommand("select-concepts",
                                    "Pick the top concepts per category from a pool");
  add_manifest_flag(select, flags);
  std::size_t select_k = 0;
  select->add_option("--concepts,-k", select_k, "Concepts to keep per category")
      ->required();
  std::string pool_catalog;
  std::string pool_embeddings;
  select->add_option("--pool-catalog", pool_catalog, "Candidate catalog (JSON)");
  select->add_option("--pool-embeddings", pool_embeddings, "Candidate embeddings");
  select->add_option("--selection-split", flags.selection_split,
                     "Image split for selection (default: eval)");
  select->add_option("--out", flags.out, "Output bundle directory")->required();

  auto* convert = app.add_subcommand("convert", "Convert between tensor files and CSV");
  std::string conv_in;
  std::string conv_out;
  bool conv_normalize = false;
  convert->add_option("--input", conv_in, "Input (.orcaemb or .csv)")->required();
  convert->add_option("--output", conv_out, "Output (.orcaemb or .csv)")->required();
  convert->add_flag("--normalize", conv_normalize, "L2-normalize every row");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic acceptance bundle");
  orca::SynthConfig synth_cfg;
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output bundle directory")->required();
  synth->add_option("--categories", synth_cfg.categories)->capture_default_str();
  synth->add_option("--concepts", synth_cfg.concepts)->capture_default_str();
  synth->add_option("--pool-size", synth_cfg.pool_size)->capture_default_str();
  synth->add_option("--samples", synth_cfg.samples)->capture_default_str();
  synth->add_option("--train-samples", synth_cfg.train_samples)->capture_default_str();
  synth->add_option("--failure-rate", synth_cfg.failure_rate)->capture_default_str();
  synth->add_option("--templates", synth_cfg.templates)->capture_default_str();
  synth->add_option("--seed", synth_cfg.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*evaluate) return run_evaluate(flags, write_records);
    if (*interpret) return run_interpret(flags, samples, failures_of, failure_limit);
    if (*sweep) return run_sweep(flags, k_values, schemes);
    if (*select) return run_select(flags, select_k, pool_catalog, pool_embeddings);
    if (*convert) return run_convert(conv_in, conv_out, conv_normalize);
    if (*synth) return run_synth(synth_cfg, synth_out);
  } catch (const orca::IoError& e) {
    std::cerr << "orca: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "orca: I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const orca::InputError& e) {
    std::cerr << "orca: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "orca: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
