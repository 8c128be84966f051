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

#include "orca/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "orca/errors.hpp"

namespace orca {

namespace {

std::vector<TextBank> make_template_banks(const DatasetBundle& bundle) {
  std::vector<TextBank> banks;
  banks.reserve(bundle.template_text_embeddings.size());
  for (const auto& t : bundle.template_text_embeddings) banks.emplace_back(t);
  return banks;
}

unsigned resolve_workers(unsigned requested, std::size_t samples) {
  unsigned w = requested;
  if (w == 0) w = std::max(1u, std::thread::hardware_concurrency());
  const auto cap = static_cast<unsigned>(std::max<std::size_t>(1, samples));
  return std::min(w, cap);
}

}  // namespace

std::string Method::tag() const {
  switch (family) {
    case Family::kOrcaB:
      return "orca-b";
    case Family::kOrcaR:
      return "orca-r";
    case Family::kBaseline:
      break;
  }
  return std::string(to_string(predictor)) + "+" + std::string(to_string(csf));
}

std::vector<Method> expand_methods(const std::vector<std::string>& methods,
                                   const std::vector<std::string>& csfs) {
  std::vector<Csf> parsed_csfs;
  for (const auto& c : csfs) parsed_csfs.push_back(parse_csf(c));

  std::vector<Method> baselines;
  std::vector<Method> variants;
  std::set<std::string> seen;
  for (const auto& name : methods) {
    if (!seen.insert(name).second) {
      throw ConfigurationError("method '" + name + "' listed twice");
    }
    if (name == "orca-b") {
      variants.push_back(Method::orca_b());
    } else if (name == "orca-r") {
      variants.push_back(Method::orca_r());
    } else {
      const Predictor p = parse_predictor(name);
      if (parsed_csfs.empty()) {
        throw ConfigurationError("baseline predictor '" + name +
                                 "' needs at least one CSF");
      }
      for (Csf c : parsed_csfs) baselines.push_back(Method::baseline(p, c));
    }
  }
  std::set<std::string> tags;
  for (const auto& m : baselines) {
    if (!tags.insert(m.tag()).second) {
      throw ConfigurationError("CSF listed twice in '" + m.tag() + "'");
    }
  }
  baselines.insert(baselines.end(), variants.begin(), variants.end());
  if (baselines.empty()) {
    throw ConfigurationError("no methods configured");
  }
  return baselines;
}

std::vector<std::string> default_method_names(const DatasetBundle& bundle) {
  std::vector<std::string> names = {"zero-shot"};
  if (!bundle.template_text_embeddings.empty()) names.emplace_back("ensemble");
  names.emplace_back("descclip");
  names.emplace_back("orca-b");
  names.emplace_back("orca-r");
  return names;
}

std::vector<std::string> default_csf_names() { return {"msp", "odin", "doctor"}; }

std::size_t resolve_rank_depth(const DatasetBundle& bundle,
                               const EvalOptions& options) {
  const std::size_t depth =
      options.rank_depth.value_or(bundle.concepts_per_category());
  const std::size_t limit = bundle.catalog.num_concepts();
  if (depth < 1 || depth > limit) {
    throw ParameterError("ranking depth " + std::to_string(depth) +
                         " outside [1, " + std::to_string(limit) + "]");
  }
  return depth;
}

SampleScorer::SampleScorer(const DatasetBundle& bundle,
                           const EvalOptions& options)
    : bundle_(bundle),
      options_(options),
      rank_depth_(resolve_rank_depth(bundle, options)),
      weights_(rank_weights(rank_depth_, options.scheme)),
      categories_(bundle.category_text_embeddings),
      concepts_(bundle.concept_text_embeddings),
      templates_(make_template_banks(bundle)) {
  for (const auto& m : options_.methods) {
    if (m.family != Method::Family::kBaseline) {
      need_concepts_ = true;
      continue;
    }
    switch (m.predictor) {
      case Predictor::kZeroShot:
        need_zero_shot_ = true;
        break;
      case Predictor::kEnsemble:
        need_ensemble_ = true;
        break;
      case Predictor::kDescClip:
        need_concepts_ = true;
        break;
    }
  }
  if (need_ensemble_ && templates_.empty()) {
    throw ConfigurationError(
        "ensemble predictor requested but the manifest lists no templates");
  }
}

SampleScorer::SampleLogits SampleScorer::logits(std::size_t sample) const {
  const auto image = bundle_.image_embeddings.row(sample);
  SampleLogits out;
  if (need_zero_shot_) out.zero_shot = similarity_logits(image, categories_);
  if (need_ensemble_) {
    std::vector<LogitVector> per_template;
    per_template.reserve(templates_.size());
    for (const auto& t : templates_) {
      per_template.push_back(similarity_logits(image, t));
    }
    out.ensemble = mean_of_rows(per_template);
  }
  if (need_concepts_) out.concepts = similarity_logits(image, concepts_);
  return out;
}

Decision SampleScorer::score(const Method& method,
                             const SampleLogits& logits) const {
  const std::size_t num_categories = bundle_.num_categories();
  const std::size_t k = bundle_.concepts_per_category();
  switch (method.family) {
    case Method::Family::kOrcaB:
      return orca_b(top_k_concepts(*logits.concepts, k, rank_depth_),
                    num_categories, rank_depth_);
    case Method::Family::kOrcaR:
      return orca_r(top_k_concepts(*logits.concepts, k, rank_depth_), weights_,
                    num_categories);
    case Method::Family::kBaseline:
      break;
  }
  switch (method.predictor) {
    case Predictor::kZeroShot:
      return apply_csf(method.csf, *logits.zero_shot,
                       options_.odin_temperature);
    case Predictor::kEnsemble:
      return apply_csf(method.csf, *logits.ensemble, options_.odin_temperature);
    case Predictor::kDescClip:
      return apply_csf(method.csf, mean_per_category(*logits.concepts, k),
                       options_.odin_temperature);
  }
  throw std::logic_error("unhandled method");
}

EvalResults evaluate(const DatasetBundle& bundle, const EvalOptions& options) {
  if (options.methods.empty()) {
    throw ConfigurationError("no methods configured");
  }
  const SampleScorer scorer(bundle, options);
  const std::size_t n = bundle.num_samples();
  const std::size_t n_methods = options.methods.size();

  // decisions[m * n + i]
  std::vector<Decision> decisions(n_methods * n);
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&](std::size_t begin, std::size_t end) {
    try {
      for (std::size_t i = begin; i < end; ++i) {
        const auto logits = scorer.logits(i);
        for (std::size_t m = 0; m < n_methods; ++m) {
          decisions[m * n + i] = scorer.score(options.methods[m], logits);
        }
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
    }
  };

  const unsigned workers = resolve_workers(options.workers, n);
  if (workers <= 1) {
    work(0, n);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }
  if (failure) std::rethrow_exception(failure);

  EvalResults results;
  results.rank_depth = scorer.rank_depth();
  results.options = options;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodResult r;
    r.method = options.methods[m];
    r.records.reserve(n);
    const std::string tag = r.method.tag();
    for (std::size_t i = 0; i < n; ++i) {
      const Decision& d = decisions[m * n + i];
      const bool correct =
          d.prediction == static_cast<std::size_t>(bundle.labels[i]);
      r.records.push_back({i, d.prediction, d.confidence, tag, correct});
      if (gate(d.confidence, options.tau) == GateDecision::kDetect) {
        ++r.detected;
      }
    }
    r.metrics = evaluate_outcomes(outcomes_of(r));
    results.methods.push_back(std::move(r));
  }
  return results;
}

std::vector<ScoredOutcome> outcomes_of(const MethodResult& result) {
  std::vector<ScoredOutcome> out;
  out.reserve(result.records.size());
  for (const auto& r : result.records) out.push_back({r.confidence, r.correct});
  return out;
}

}  // namespace orca
