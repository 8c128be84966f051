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
#include <random>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "orca/errors.hpp"
#include "orca/fs.hpp"
#include "orca/pipeline.hpp"
#include "orca/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace orca {
namespace {

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

EvalOptions all_methods(const DatasetBundle& b) {
  EvalOptions o;
  o.methods = expand_methods(default_method_names(b), default_csf_names());
  return o;
}

SynthBundle small_synth(std::uint64_t seed = 3) {
  SynthConfig cfg;
  cfg.samples = 200;
  cfg.train_samples = 100;
  cfg.seed = seed;
  return make_synthetic_bundle(cfg);
}

TEST(Methods, ExpansionAndTags) {
  const auto m = expand_methods(
      {"zero-shot", "ensemble", "descclip", "orca-b", "orca-r"},
      {"msp", "odin", "doctor"});
  ASSERT_EQ(m.size(), 11u);
  EXPECT_EQ(m.front().tag(), "zero-shot+msp");
  EXPECT_EQ(m[8].tag(), "descclip+doctor");
  EXPECT_EQ(m[9].tag(), "orca-b");
  EXPECT_EQ(m[10].tag(), "orca-r");
  EXPECT_THROW(expand_methods({"orca-b", "orca-b"}, {"msp"}),
               ConfigurationError);
  EXPECT_THROW(expand_methods({"clip"}, {"msp"}), ConfigurationError);
  EXPECT_THROW(expand_methods({"zero-shot"}, {"energy"}), ConfigurationError);
  EXPECT_THROW(expand_methods({}, {"msp"}), ConfigurationError);
}

TEST(Pipeline, DefaultMethodsDependOnTemplates) {
  std::mt19937_64 rng(61);
  const auto none = testing::random_bundle(3, 2, 8, 10, rng);
  const auto some = testing::random_bundle(3, 2, 8, 10, rng, 2);
  const auto a = default_method_names(none);
  const auto b = default_method_names(some);
  EXPECT_EQ(std::count(a.begin(), a.end(), "ensemble"), 0);
  EXPECT_EQ(std::count(b.begin(), b.end(), "ensemble"), 1);
  EvalOptions o;
  o.methods = {Method::baseline(Predictor::kEnsemble, Csf::kMsp)};
  EXPECT_THROW(evaluate(none, o), ConfigurationError);
}

TEST(Pipeline, RecordsMatchDirectScoring) {
  std::mt19937_64 rng(62);
  const auto b = testing::random_bundle(4, 5, 16, 60, rng, 2);
  auto opts = all_methods(b);
  opts.rank_depth = 7;
  opts.scheme = WeightScheme::kLinear;
  const auto res = evaluate(b, opts);
  ASSERT_EQ(res.methods.size(), opts.methods.size());
  EXPECT_EQ(res.rank_depth, 7u);
  const auto w = rank_weights(7, WeightScheme::kLinear);
  for (const auto& mr : res.methods) {
    ASSERT_EQ(mr.records.size(), b.num_samples());
    for (std::size_t i = 0; i < b.num_samples(); ++i) {
      const auto& rec = mr.records[i];
      EXPECT_EQ(rec.sample_index, i);
      EXPECT_EQ(rec.method, mr.method.tag());
      Decision d;
      switch (mr.method.family) {
        case Method::Family::kOrcaB:
          d = orca_b(top_k_concepts(similarity_logits(b.image_embeddings.row(i),
                                                      b.concept_text_embeddings),
                                    5, 7),
                     4, 7);
          break;
        case Method::Family::kOrcaR:
          d = orca_r(top_k_concepts(similarity_logits(b.image_embeddings.row(i),
                                                      b.concept_text_embeddings),
                                    5, 7),
                     w, 4);
          break;
        case Method::Family::kBaseline: {
          LogitVector s;
          if (mr.method.predictor == Predictor::kZeroShot) s = predict_zero_shot(b, i);
          if (mr.method.predictor == Predictor::kEnsemble) s = predict_ensemble(b, i);
          if (mr.method.predictor == Predictor::kDescClip) s = predict_descclip(b, i);
          d = apply_csf(mr.method.csf, s, opts.odin_temperature);
          break;
        }
      }
      EXPECT_EQ(rec.predicted_category, d.prediction);
      EXPECT_EQ(rec.confidence, d.confidence);
      EXPECT_EQ(rec.correct, static_cast<int>(d.prediction) == b.labels[i]);
    }
  }
}

TEST(Pipeline, MetricsConsumeRecordedConfidences) {
  std::mt19937_64 rng(63);
  const auto b = testing::random_bundle(3, 4, 12, 80, rng);
  const auto res = evaluate(b, all_methods(b));
  for (const auto& mr : res.methods) {
    const auto o = outcomes_of(mr);
    ASSERT_EQ(o.size(), mr.records.size());
    std::size_t detected = 0;
    for (std::size_t i = 0; i < o.size(); ++i) {
      EXPECT_EQ(o[i].confidence, mr.records[i].confidence);
      EXPECT_EQ(o[i].correct, mr.records[i].correct);
      if (gate(o[i].confidence, res.options.tau) == GateDecision::kDetect) {
        ++detected;
      }
    }
    EXPECT_EQ(mr.detected, detected);
    const auto m = evaluate_outcomes(o);
    EXPECT_EQ(m.auroc, mr.metrics.auroc);
    EXPECT_EQ(m.fpr_at_95tpr, mr.metrics.fpr_at_95tpr);
    EXPECT_EQ(mr.metrics.n_correct + mr.metrics.n_incorrect, b.num_samples());
  }
}

TEST(Pipeline, IndependentOfWorkerCount) {
  std::mt19937_64 rng(64);
  const auto b = testing::random_bundle(5, 6, 16, 97, rng, 1);
  auto opts = all_methods(b);
  opts.workers = 1;
  const auto one = evaluate(b, opts);
  for (unsigned w : {2u, 3u, 8u}) {
    opts.workers = w;
    const auto many = evaluate(b, opts);
    EXPECT_EQ(records_csv(one), records_csv(many));
    EXPECT_EQ(eval_report_csv(one), eval_report_csv(many));
  }
}

TEST(Pipeline, RankDepthValidation) {
  std::mt19937_64 rng(65);
  const auto b = testing::random_bundle(3, 4, 8, 10, rng);
  EvalOptions o = all_methods(b);
  EXPECT_EQ(resolve_rank_depth(b, o), 4u);
  o.rank_depth = 12;
  EXPECT_EQ(resolve_rank_depth(b, o), 12u);
  o.rank_depth = 13;
  EXPECT_THROW(resolve_rank_depth(b, o), ParameterError);
  o.rank_depth = 0;
  EXPECT_THROW(resolve_rank_depth(b, o), ParameterError);
}

// C = 3, K = 4 bundle with hand-placed concept directions.
DatasetBundle toy_interpretation_bundle() {
  DatasetBundle b;
  b.category_names = {"cat", "dog", "fox"};
  std::vector<CategoryConcepts> cats;
  for (const auto& name : b.category_names) {
    CategoryConcepts cc{name, {}};
    for (int k = 0; k < 4; ++k) cc.concepts.push_back(name + "_" + std::to_string(k));
    cats.push_back(cc);
  }
  b.catalog = ConceptCatalog(cats);
  std::mt19937_64 rng(66);
  b.image_embeddings = testing::random_matrix(6, 8, rng);
  b.labels = {0, 1, 2, 0, 1, 2};
  b.category_text_embeddings = testing::random_matrix(3, 8, rng);
  b.concept_text_embeddings = testing::random_matrix(12, 8, rng);
  validate_bundle(b);
  return b;
}

TEST(Interpret, TopConceptsMatchFullSort) {
  const auto b = toy_interpretation_bundle();
  EvalOptions o;
  o.methods = {Method::orca_r()};
  for (std::size_t i = 0; i < b.num_samples(); ++i) {
    const auto r = interpret_sample(b, i, o);
    const auto s = similarity_logits(b.image_embeddings.row(i),
                                     b.concept_text_embeddings);
    const auto ref = oracle::sorted_prefix(s, 10);
    ASSERT_EQ(r.top_concepts.size(), 10u);
    for (std::size_t j = 0; j < 10; ++j) {
      EXPECT_EQ(r.top_concepts[j].concept_index, ref[j]);
      EXPECT_EQ(r.top_concepts[j].category, ref[j] / 4);
      EXPECT_EQ(r.top_concepts[j].category_name, b.category_names[ref[j] / 4]);
      EXPECT_EQ(r.top_concepts[j].score, s[ref[j]]);
    }
    ASSERT_EQ(r.top_categories.size(), 3u);
    EXPECT_GE(r.top_categories[0].probability, r.top_categories[1].probability);
    EXPECT_GE(r.top_categories[1].probability, r.top_categories[2].probability);
    ASSERT_EQ(r.predictions.size(), 1u);
    EXPECT_EQ(r.predictions[0].method, "orca-r");
  }
  EXPECT_THROW(interpret_sample(b, 6, o), ParameterError);
}

TEST(Interpret, TruncatesShortLists) {
  std::mt19937_64 rng(67);
  const auto b = testing::random_bundle(2, 3, 8, 4, rng);
  EvalOptions o;
  o.methods = {Method::orca_b()};
  const auto r = interpret_sample(b, 0, o);
  EXPECT_EQ(r.top_categories.size(), 2u);
  EXPECT_EQ(r.top_concepts.size(), 6u);
}

TEST(Interpret, AgreementCounts) {
  // Every concept of category 0 points at the image; others are orthogonal.
  DatasetBundle b;
  b.category_names = {"a", "b", "c"};
  std::vector<CategoryConcepts> cats;
  for (const auto& name : b.category_names) {
    CategoryConcepts cc{name, {}};
    for (int k = 0; k < 10; ++k) cc.concepts.push_back(name + std::to_string(k));
    cats.push_back(cc);
  }
  b.catalog = ConceptCatalog(cats);
  b.image_embeddings = testing::matrix_from({{1, 0, 0, 0}, {0, 1, 1, 1}});
  b.labels = {0, 0};
  b.category_text_embeddings =
      testing::matrix_from({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}});
  std::vector<std::vector<float>> concepts;
  for (int c = 0; c < 3; ++c) {
    for (int k = 0; k < 10; ++k) {
      std::vector<float> v(4, 0.0f);
      v[static_cast<std::size_t>(c)] = 1.0f;
      v[3] = 0.01f * static_cast<float>(k % 4);
      concepts.push_back(v);
    }
  }
  b.concept_text_embeddings = testing::matrix_from(concepts);
  validate_bundle(b);
  EvalOptions o;
  o.methods = {Method::orca_b()};
  const auto clean = interpret_sample(b, 0, o);
  EXPECT_EQ(clean.concepts_from_true_category(), 10u);
  EXPECT_EQ(clean.distinct_concept_categories(), 1u);
  const auto mixed = interpret_sample(b, 1, o);
  EXPECT_EQ(mixed.concepts_from_true_category(), 0u);
  EXPECT_EQ(mixed.distinct_concept_categories(), 2u);

  // A 3-way mix using the synthetic failure population.
  const auto synth = small_synth();
  for (std::size_t i = 0; i < synth.bundle.num_samples(); ++i) {
    if (!synth.planted_failure[i]) continue;
    const auto r = interpret_sample(synth.bundle, i, o);
    EXPECT_GE(r.distinct_concept_categories(), 3u);
    break;
  }
}

TEST(Report, CsvShapesAndDeterminism) {
  std::mt19937_64 rng(68);
  const auto b = testing::random_bundle(4, 3, 10, 50, rng, 2);
  const auto res = evaluate(b, all_methods(b));
  ASSERT_EQ(res.methods.size(), 11u);
  const auto csv = eval_report_csv(res);
  EXPECT_EQ(count_lines(csv), 12u);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,auroc,fpr95,acc");
  EXPECT_EQ(count_lines(records_csv(res)), 1u + 11u * 50u);

  EvalOptions single;
  single.methods = {Method::orca_b()};
  EXPECT_EQ(count_lines(eval_report_csv(evaluate(b, single))), 2u);

  testing::TempDir d1("emit1");
  testing::TempDir d2("emit2");
  const auto meta = metadata_for(b);
  const auto p1 = emit_eval_report(b, res, meta, d1.path());
  const auto p2 = emit_eval_report(b, evaluate(b, all_methods(b)), meta, d2.path());
  EXPECT_EQ(read_file(p1.json), read_file(p2.json));
  EXPECT_EQ(read_file(p1.csv), read_file(p2.csv));
  EXPECT_EQ(read_file(p1.csv), csv);
  EXPECT_FALSE(std::filesystem::exists(d1 / "report.json.tmp"));
}

TEST(Report, JsonListsEveryMethodOnce) {
  std::mt19937_64 rng(69);
  const auto b = testing::random_bundle(3, 3, 8, 30, rng);
  const auto res = evaluate(b, all_methods(b));
  const auto text = eval_report_json(b, res, metadata_for(b));
  for (const auto& mr : res.methods) {
    const std::string needle = "\"method\": \"" + mr.method.tag() + "\"";
    const auto first = text.find(needle);
    ASSERT_NE(first, std::string::npos) << needle;
    EXPECT_EQ(text.find(needle, first + 1), std::string::npos);
  }
  EXPECT_NE(text.find("\"tie_rules\""), std::string::npos);
  EXPECT_NE(text.find("\"report_format_version\": 1"), std::string::npos);
}

TEST(Report, FormatPercent) {
  EXPECT_EQ(format_percent(0.7755), "77.55");
  EXPECT_EQ(format_percent(1.0), "100.00");
  EXPECT_EQ(format_percent(std::nullopt), "nan");
}

TEST(Sweep, RowCountsAndErrors) {
  const auto s = small_synth();
  SweepOptions o;
  o.k_values = {5, 10};
  o.schemes = {WeightScheme::kLogarithmic, WeightScheme::kUniform};
  o.selection_split = "train";
  const auto rows = ablation_sweep(s.bundle, o);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].k, 5u);
  EXPECT_EQ(rows[1].scheme, "uniform");
  EXPECT_EQ(count_lines(sweep_csv(rows)), 5u);

  o.methods = {"orca-r", "orca-b", "descclip+msp"};
  EXPECT_EQ(ablation_sweep(s.bundle, o).size(), 8u);

  o.k_values = {26};
  EXPECT_THROW(ablation_sweep(s.bundle, o), ValidationError);
  o.k_values = {5};
  o.selection_split = "val";
  EXPECT_THROW(ablation_sweep(s.bundle, o), ConfigurationError);
  o.selection_split = "eval";
  o.methods = {"zero-shot+odin"};
  EXPECT_THROW(ablation_sweep(s.bundle, o), ConfigurationError);
}

TEST(Sweep, DegenerateSweepEqualsMainRun) {
  std::mt19937_64 rng(70);
  const auto b = testing::random_bundle(4, 6, 12, 120, rng);
  SweepOptions o;
  o.k_values = {6};
  o.schemes = {WeightScheme::kLogarithmic};
  const auto rows = ablation_sweep(b, o);
  ASSERT_EQ(rows.size(), 1u);
  EvalOptions e;
  e.methods = {Method::orca_r()};
  const auto main = evaluate(b, e).methods.front().metrics;
  EXPECT_EQ(rows[0].metrics.auroc, main.auroc);
  EXPECT_EQ(rows[0].metrics.fpr_at_95tpr, main.fpr_at_95tpr);
  EXPECT_EQ(rows[0].metrics.accuracy, main.accuracy);
}

TEST(Sweep, MoreConceptsDoNotHurtOnSynthetic) {
  SynthConfig cfg;
  cfg.seed = 11;
  const auto s = make_synthetic_bundle(cfg);
  SweepOptions o;
  o.k_values = {5, 20};
  o.schemes = {WeightScheme::kLogarithmic};
  o.selection_split = "train";
  const auto rows = ablation_sweep(s.bundle, o);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GE(*rows[1].metrics.auroc, *rows[0].metrics.auroc);
}

TEST(Synth, DeterministicAndWellFormed) {
  const auto a = small_synth(5);
  const auto b = small_synth(5);
  const auto c = small_synth(6);
  EXPECT_EQ(a.bundle.image_embeddings, b.bundle.image_embeddings);
  EXPECT_EQ(a.planted_failure, b.planted_failure);
  EXPECT_FALSE(a.bundle.image_embeddings == c.bundle.image_embeddings);
  EXPECT_NO_THROW(validate_bundle(a.bundle));
  EXPECT_EQ(a.bundle.num_samples(), 200u);
  EXPECT_EQ(std::count(a.planted_failure.begin(), a.planted_failure.end(), true),
            60);
  ASSERT_TRUE(a.bundle.candidate_pool.has_value());
  EXPECT_EQ(a.bundle.candidate_pool->embeddings.rows(), 10u * 25u);
  EXPECT_EQ(a.bundle.splits.at("train").labels.size(), 100u);
  EXPECT_EQ(a.bundle.template_text_embeddings.size(), 2u);
}

TEST(Synth, PlantedPopulationsHaveTheirSignatures) {
  const auto s = small_synth(9);
  const auto& b = s.bundle;
  const std::size_t K = b.concepts_per_category();
  for (std::size_t i = 0; i < b.num_samples(); ++i) {
    const auto zs = predict_zero_shot(b, i);
    const auto p = softmax(zs, 1.0);
    const auto top = top_k_concepts(
        similarity_logits(b.image_embeddings.row(i), b.concept_text_embeddings),
        K, K);
    std::set<std::size_t> cats;
    for (const auto& e : top) cats.insert(e.category_index);
    const auto label = static_cast<std::size_t>(b.labels[i]);
    if (s.planted_failure[i]) {
      EXPECT_GT(csf_msp(p), 0.9);
      EXPECT_NE(argmax(zs), label);
      EXPECT_GE(cats.size(), 3u);
      EXPECT_EQ(cats.count(label), 0u);
    } else {
      EXPECT_EQ(argmax(zs), label);
      EXPECT_EQ(cats, std::set<std::size_t>{label});
    }
  }
}

TEST(BundleFiles, SynthRoundTripsThroughManifest) {
  const auto s = small_synth(4);
  testing::TempDir dir("synth-bundle");
  const auto manifest = write_bundle(s.bundle, dir.path());
  const auto loaded = load_manifest(manifest);
  EXPECT_EQ(loaded.image_embeddings, s.bundle.image_embeddings);
  EXPECT_EQ(loaded.catalog, s.bundle.catalog);
  const auto r1 = evaluate(s.bundle, all_methods(s.bundle));
  const auto r2 = evaluate(loaded, all_methods(loaded));
  EXPECT_EQ(records_csv(r1), records_csv(r2));
}

}  // namespace
}  // namespace orca
