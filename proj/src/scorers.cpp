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

#include "orca/scorers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orca/errors.hpp"

namespace orca {

namespace {

void check_probs(std::span<const double> probs) {
  if (probs.empty()) {
    throw ShapeError("empty probability vector");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw InputError("probability outside [0, 1]: " + std::to_string(p));
    }
  }
}

void check_sample(const DatasetBundle& bundle, std::size_t sample) {
  if (sample >= bundle.num_samples()) {
    throw ParameterError("sample index " + std::to_string(sample) +
                         " out of range for " +
                         std::to_string(bundle.num_samples()) + " samples");
  }
}

}  // namespace

std::string_view to_string(Predictor p) {
  switch (p) {
    case Predictor::kZeroShot:
      return "zero-shot";
    case Predictor::kEnsemble:
      return "ensemble";
    case Predictor::kDescClip:
      return "descclip";
  }
  return "?";
}

std::string_view to_string(Csf c) {
  switch (c) {
    case Csf::kMsp:
      return "msp";
    case Csf::kOdin:
      return "odin";
    case Csf::kDoctor:
      return "doctor";
  }
  return "?";
}

Predictor parse_predictor(std::string_view name) {
  for (auto p : {Predictor::kZeroShot, Predictor::kEnsemble,
                 Predictor::kDescClip}) {
    if (to_string(p) == name) return p;
  }
  throw ConfigurationError("unknown predictor '" + std::string(name) +
                           "' (expected zero-shot, ensemble or descclip)");
}

Csf parse_csf(std::string_view name) {
  for (auto c : {Csf::kMsp, Csf::kOdin, Csf::kDoctor}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigurationError("unknown CSF '" + std::string(name) +
                           "' (expected msp, odin or doctor)");
}

LogitVector mean_of_rows(std::span<const LogitVector> rows) {
  if (rows.empty()) {
    throw ConfigurationError("mean over zero rows");
  }
  LogitVector mean = rows.front();
  for (std::size_t t = 1; t < rows.size(); ++t) {
    if (rows[t].size() != mean.size()) {
      throw ShapeError("rows of unequal length in mean");
    }
    const double n = static_cast<double>(t + 1);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean[i] += (rows[t][i] - mean[i]) / n;
    }
  }
  return mean;
}

LogitVector mean_per_category(std::span<const double> concept_logits,
                              std::size_t k) {
  if (k == 0 || concept_logits.empty() || concept_logits.size() % k != 0) {
    throw ShapeError("concept logits of length " +
                     std::to_string(concept_logits.size()) +
                     " cannot be split into groups of " + std::to_string(k));
  }
  LogitVector out(concept_logits.size() / k);
  for (std::size_t c = 0; c < out.size(); ++c) {
    double mean = concept_logits[c * k];
    for (std::size_t j = 1; j < k; ++j) {
      mean += (concept_logits[c * k + j] - mean) / static_cast<double>(j + 1);
    }
    out[c] = mean;
  }
  return out;
}

LogitVector predict_zero_shot(const DatasetBundle& bundle, std::size_t sample) {
  check_sample(bundle, sample);
  return similarity_logits(bundle.image_embeddings.row(sample),
                           bundle.category_text_embeddings);
}

LogitVector predict_ensemble(const DatasetBundle& bundle, std::size_t sample) {
  check_sample(bundle, sample);
  if (bundle.template_text_embeddings.empty()) {
    throw ConfigurationError("ensemble predictor needs at least one template");
  }
  std::vector<LogitVector> per_template;
  per_template.reserve(bundle.template_text_embeddings.size());
  for (const auto& t : bundle.template_text_embeddings) {
    per_template.push_back(
        similarity_logits(bundle.image_embeddings.row(sample), t));
  }
  return mean_of_rows(per_template);
}

LogitVector predict_descclip(const DatasetBundle& bundle, std::size_t sample) {
  check_sample(bundle, sample);
  const auto concepts = similarity_logits(bundle.image_embeddings.row(sample),
                                          bundle.concept_text_embeddings);
  return mean_per_category(concepts, bundle.concepts_per_category());
}

double csf_msp(std::span<const double> probs) {
  check_probs(probs);
  return *std::max_element(probs.begin(), probs.end());
}

double csf_odin(std::span<const double> logits, double temperature) {
  const auto p = softmax(logits, temperature);
  return *std::max_element(p.begin(), p.end());
}

double csf_doctor(std::span<const double> probs) {
  check_probs(probs);
  double g = 0.0;
  for (double p : probs) g += p * p;
  return g;
}

Decision apply_csf(Csf csf, std::span<const double> logits,
                   double odin_temperature) {
  Decision d;
  d.prediction = argmax(logits);
  switch (csf) {
    case Csf::kMsp:
      d.confidence = csf_msp(softmax(logits, 1.0));
      break;
    case Csf::kOdin:
      d.confidence = csf_odin(logits, odin_temperature);
      break;
    case Csf::kDoctor:
      d.confidence = csf_doctor(softmax(logits, 1.0));
      break;
  }
  return d;
}

}  // namespace orca
