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

#include "orca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "orca/errors.hpp"

namespace orca {

namespace {

// Cosine targets, in units of cosine (logits are 100x these).
constexpr double kCategoryBase = 0.15;
constexpr double kCategoryJitter = 0.003;
constexpr double kCleanMarginLo = 0.01;
constexpr double kCleanMarginHi = 0.03;
constexpr double kFailureBoostLo = 0.065;
constexpr double kFailureBoostHi = 0.08;
constexpr double kConceptActivation = 0.06;
constexpr double kConceptJitter = 0.006;
constexpr double kConceptNoise = 0.004;
constexpr double kTemplateNoise = 0.01;
constexpr int kReflections = 3;
constexpr int kMaxAttempts = 1000;

// mt19937_64 is fully specified; the std distributions are not, so uniform
// and normal draws are derived by hand to keep bundles identical across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }
  double normal(double sigma) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct Layout {
  std::size_t categories;
  std::size_t pool;
  std::size_t dim;  // categories + categories * pool + residual

  std::size_t category_axis(std::size_t c) const { return c; }
  std::size_t concept_axis(std::size_t c, std::size_t p) const {
    return categories + c * pool + p;
  }
  std::size_t residual_axis() const { return dim - 1; }
};

class Reflector {
 public:
  Reflector(std::size_t dim, Rng& rng) {
    for (int r = 0; r < kReflections; ++r) {
      std::vector<double> v(dim);
      double sq = 0.0;
      for (double& x : v) {
        x = rng.normal(1.0);
        sq += x * x;
      }
      const double n = std::sqrt(sq);
      for (double& x : v) x /= n;
      planes_.push_back(std::move(v));
    }
  }

  void apply(std::vector<double>& x) const {
    for (const auto& v : planes_) {
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += v[i] * x[i];
      for (std::size_t i = 0; i < x.size(); ++i) x[i] -= 2.0 * d * v[i];
    }
  }

 private:
  std::vector<std::vector<double>> planes_;
};

struct Sample {
  std::vector<double> coef;  // cosine target per axis, residual excluded
};

// Top-`depth` categories by coefficient among the first `k` pool concepts of
// every category (the bundle catalog), ties by lower index.
std::vector<std::size_t> top_concept_categories(const Layout& L,
                                                const std::vector<double>& coef,
                                                std::size_t k,
                                                std::size_t depth) {
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t c = 0; c < L.categories; ++c) {
    for (std::size_t p = 0; p < k; ++p) {
      scored.emplace_back(coef[L.concept_axis(c, p)], c * k + p);
    }
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::size_t> cats;
  for (std::size_t r = 0; r < depth; ++r) cats.push_back(scored[r].second / k);
  return cats;
}

double zero_shot_msp(const Layout& L, const std::vector<double>& coef,
                     std::size_t* argmax_out) {
  double max = coef[0];
  std::size_t best = 0;
  for (std::size_t c = 1; c < L.categories; ++c) {
    if (coef[c] > max) {
      max = coef[c];
      best = c;
    }
  }
  double total = 0.0;
  for (std::size_t c = 0; c < L.categories; ++c) {
    total += std::exp(100.0 * (coef[c] - max));
  }
  *argmax_out = best;
  return 1.0 / total;
}

std::vector<double> draw_sample(const Layout& L, const SynthConfig& cfg,
                                const std::vector<double>& relevance,
                                std::size_t label, bool failure, Rng& rng) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::vector<double> coef(L.dim - 1, 0.0);
    for (std::size_t c = 0; c < L.categories; ++c) {
      coef[L.category_axis(c)] = kCategoryBase + rng.normal(kCategoryJitter);
      for (std::size_t p = 0; p < L.pool; ++p) {
        coef[L.concept_axis(c, p)] = rng.normal(kConceptNoise);
      }
    }
    auto activate = [&](std::size_t c) {
      for (std::size_t p = 0; p < L.pool; ++p) {
        coef[L.concept_axis(c, p)] += kConceptActivation * relevance[c * L.pool + p] +
                                      rng.normal(kConceptJitter);
      }
    };

    if (!failure) {
      coef[L.category_axis(label)] += rng.uniform(kCleanMarginLo, kCleanMarginHi);
      activate(label);
    } else {
      // The inflated wrong category, plus two or three more, all != label.
      std::vector<std::size_t> others;
      for (std::size_t c = 0; c < L.categories; ++c) {
        if (c != label) others.push_back(c);
      }
      rng.shuffle(others);
      const std::size_t spread = std::min<std::size_t>(others.size(), 3 + rng.below(2));
      coef[L.category_axis(others[0])] +=
          rng.uniform(kFailureBoostLo, kFailureBoostHi);
      for (std::size_t i = 0; i < spread; ++i) activate(others[i]);
    }

    double sq = 0.0;
    for (double x : coef) sq += x * x;
    if (sq >= 0.99) continue;

    std::size_t zs_pred = 0;
    const double msp = zero_shot_msp(L, coef, &zs_pred);
    const auto cats = top_concept_categories(L, coef, cfg.concepts, cfg.concepts);
    const std::set<std::size_t> distinct(cats.begin(), cats.end());
    if (!failure) {
      if (zs_pred != label || distinct.size() != 1 || *distinct.begin() != label) {
        continue;
      }
    } else {
      if (zs_pred == label || !(msp > cfg.failure_msp_floor) ||
          distinct.size() < 3 || distinct.count(label) != 0) {
        continue;
      }
    }
    coef.push_back(std::sqrt(1.0 - sq));
    return coef;
  }
  throw ParameterError("synthetic generator could not satisfy the planted "
                       "constraints; try more categories or fewer concepts");
}

EmbeddingMatrix to_matrix(const std::vector<std::vector<double>>& rows,
                          bool normalized) {
  const std::size_t cols = rows.front().size();
  std::vector<float> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    for (double x : r) data.push_back(static_cast<float>(x));
  }
  return EmbeddingMatrix(rows.size(), cols, std::move(data), normalized);
}

std::string category_name(std::size_t c) {
  std::string s = std::to_string(c);
  return "category_" + std::string(s.size() < 2 ? 2 - s.size() : 0, '0') + s;
}

ImageSplit draw_split(const Layout& L, const SynthConfig& cfg,
                      const std::vector<double>& relevance,
                      const Reflector& reflector, std::size_t n, Rng& rng,
                      std::vector<bool>* planted_out) {
  std::vector<bool> planted(n, false);
  const auto n_fail = static_cast<std::size_t>(
      std::llround(cfg.failure_rate * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(idx);
  for (std::size_t i = 0; i < std::min(n_fail, n); ++i) planted[idx[i]] = true;

  ImageSplit split;
  std::vector<std::vector<double>> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i % L.categories;
    auto x = draw_sample(L, cfg, relevance, label, planted[i], rng);
    reflector.apply(x);
    rows.push_back(std::move(x));
    split.labels.push_back(static_cast<int>(label));
  }
  split.images = to_matrix(rows, true);
  if (planted_out) *planted_out = std::move(planted);
  return split;
}

}  // namespace

SynthBundle make_synthetic_bundle(const SynthConfig& cfg) {
  if (cfg.categories < 5) {
    throw ParameterError("synthetic bundles need at least 5 categories");
  }
  if (cfg.concepts < 1 || cfg.pool_size < cfg.concepts) {
    throw ParameterError("need 1 <= concepts <= pool_size");
  }
  if (cfg.samples < cfg.categories) {
    throw ParameterError("need at least one evaluation sample per category");
  }
  if (cfg.train_samples != 0 && cfg.train_samples < cfg.categories) {
    throw ParameterError("train split needs at least one sample per category");
  }
  if (!(cfg.failure_rate > 0.0 && cfg.failure_rate < 1.0)) {
    throw ParameterError("failure rate must lie in (0, 1)");
  }

  Rng rng(cfg.seed);
  const Layout L{cfg.categories, cfg.pool_size,
                 cfg.categories + cfg.categories * cfg.pool_size + 1};
  const Reflector reflector(L.dim, rng);

  std::vector<double> relevance(cfg.categories * cfg.pool_size);
  for (double& q : relevance) q = rng.uniform(0.6, 1.0);

  auto axis = [&](std::size_t a) {
    std::vector<double> e(L.dim, 0.0);
    e[a] = 1.0;
    reflector.apply(e);
    return e;
  };

  SynthBundle out;
  DatasetBundle& b = out.bundle;
  b.dataset_id = "synthetic-seed" + std::to_string(cfg.seed);
  b.backbone_id = "synthetic";

  std::vector<CategoryConcepts> pool_cats(cfg.categories);
  std::vector<CategoryConcepts> catalog_cats(cfg.categories);
  std::vector<std::vector<double>> category_rows;
  std::vector<std::vector<double>> pool_rows;
  std::vector<std::vector<double>> concept_rows;
  for (std::size_t c = 0; c < cfg.categories; ++c) {
    const std::string name = category_name(c);
    b.category_names.push_back(name);
    pool_cats[c].name = name;
    catalog_cats[c].name = name;
    category_rows.push_back(axis(L.category_axis(c)));
    for (std::size_t p = 0; p < cfg.pool_size; ++p) {
      const std::string concept_name = name + " attribute " + std::to_string(p);
      auto row = axis(L.concept_axis(c, p));
      pool_cats[c].concepts.push_back(concept_name);
      if (p < cfg.concepts) {
        catalog_cats[c].concepts.push_back(concept_name);
        concept_rows.push_back(row);
      }
      pool_rows.push_back(std::move(row));
    }
  }
  b.catalog = ConceptCatalog(catalog_cats);
  b.category_text_embeddings = to_matrix(category_rows, true);
  b.concept_text_embeddings = to_matrix(concept_rows, true);
  b.candidate_pool = CandidatePool{pool_cats, to_matrix(pool_rows, true)};

  for (std::size_t t = 0; t < cfg.templates; ++t) {
    std::vector<std::vector<double>> rows;
    for (std::size_t c = 0; c < cfg.categories; ++c) {
      std::vector<double> e(L.dim, 0.0);
      for (double& x : e) x = rng.normal(kTemplateNoise);
      e[L.category_axis(c)] += 1.0;
      reflector.apply(e);
      rows.push_back(std::move(e));
    }
    b.template_text_embeddings.push_back(to_matrix(rows, false));
  }

  auto eval = draw_split(L, cfg, relevance, reflector, cfg.samples, rng,
                         &out.planted_failure);
  b.image_embeddings = std::move(eval.images);
  b.labels = std::move(eval.labels);
  if (cfg.train_samples > 0) {
    b.splits.emplace("train", draw_split(L, cfg, relevance, reflector,
                                         cfg.train_samples, rng, nullptr));
  }
  validate_bundle(b);
  return out;
}

}  // namespace orca
