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
#include <cstdint>
#include <vector>

#include "orca/bundle.hpp"

namespace orca {

// Synthetic bundle with two planted populations:
//  - clean: the top-K concepts all belong to the true category and the
//    zero-shot prediction is correct with a moderate softmax peak;
//  - overconfident failure: one wrong category logit is inflated so the
//    zero-shot MSP exceeds `failure_msp_floor`, while the top-K concepts
//    spread over at least three categories, none of them the true one.
//
// Each text entry owns one basis direction (categories, then pool concepts
// category-major), images are built from per-direction cosine targets plus a
// residual direction, and a few random Householder reflections are applied
// to every vector. Cosines are preserved exactly up to float rounding.
struct SynthConfig {
  std::size_t categories = 10;
  std::size_t concepts = 10;         // K in the bundle catalog
  std::size_t pool_size = 25;        // candidates per category, >= concepts
  std::size_t samples = 400;
  std::size_t train_samples = 200;   // "train" split; 0 disables it
  double failure_rate = 0.3;
  std::size_t templates = 2;
  double failure_msp_floor = 0.9;
  std::uint64_t seed = 0;
};

struct SynthBundle {
  DatasetBundle bundle;
  std::vector<bool> planted_failure;  // per evaluation sample
};

// Deterministic in `config` (including the seed). Throws ParameterError on
// inconsistent sizes.
SynthBundle make_synthetic_bundle(const SynthConfig& config);

}  // namespace orca
