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
#include <span>
#include <string>
#include <vector>

#include "orca/matrix.hpp"

namespace orca {

struct CategoryConcepts {
  std::string name;
  std::vector<std::string> concepts;

  friend bool operator==(const CategoryConcepts&,
                         const CategoryConcepts&) = default;
};

// Ordered categories, each with the same number K of ordered concepts.
// Concept k of category c has global index c * K + k.
class ConceptCatalog {
 public:
  ConceptCatalog() = default;
  // Validates unique category names, unique concepts within a category,
  // K >= 1 and identical K everywhere; throws ValidationError otherwise.
  explicit ConceptCatalog(std::vector<CategoryConcepts> categories);

  std::size_t num_categories() const { return categories_.size(); }
  std::size_t concepts_per_category() const { return k_; }
  std::size_t num_concepts() const { return categories_.size() * k_; }

  const std::vector<CategoryConcepts>& categories() const {
    return categories_;
  }
  const std::string& category_name(std::size_t c) const {
    return categories_[c].name;
  }
  const std::string& concept_name(std::size_t global_index) const;

  std::size_t category_of(std::size_t global_index) const {
    return global_index / k_;
  }
  std::size_t global_index(std::size_t category, std::size_t k) const {
    return category * k_ + k;
  }

  friend bool operator==(const ConceptCatalog&,
                         const ConceptCatalog&) = default;

 private:
  std::vector<CategoryConcepts> categories_;
  std::size_t k_ = 0;
};

struct FlatConcepts {
  std::vector<std::string> concepts;
  std::vector<std::size_t> category_of;  // global concept index -> category
};

// Category-major flattening of the catalog.
FlatConcepts flatten(const ConceptCatalog& catalog);

// Per-category candidate concepts (counts may differ between categories)
// with one embedding row per candidate, flattened category-major.
struct CandidatePool {
  std::vector<CategoryConcepts> categories;
  EmbeddingMatrix embeddings;

  // First embedding row of each category, plus a final end offset.
  std::vector<std::size_t> offsets() const;
  // Throws ValidationError if the embedding rows do not match the total
  // candidate count.
  void validate() const;
};

// Result of per-category candidate selection: the new catalog and the
// matching concept embeddings (rows in catalog order).
struct SelectedConcepts {
  ConceptCatalog catalog;
  EmbeddingMatrix embeddings;
  // Mean similarity of each selected concept over its category's images.
  std::vector<double> mean_similarity;
};

// For every category, ranks its candidates by mean scaled cosine similarity
// over the images labeled with that category and keeps the top k. Ties at
// the cut keep the earlier candidate; selected concepts retain pool order.
// Errors: SelectionError if a category has no images, ValidationError if a
// category has fewer than k candidates or labels are out of range.
SelectedConcepts select_top_concepts(const CandidatePool& pool,
                                     const EmbeddingMatrix& images,
                                     std::span<const int> labels,
                                     std::size_t k);

// Catalog files are JSON arrays of {"name": ..., "concepts": [...]}; file
// order is the canonical category order.
std::vector<CategoryConcepts> read_catalog_entries(
    const std::filesystem::path& path);
ConceptCatalog read_catalog(const std::filesystem::path& path);
std::string catalog_to_json(const ConceptCatalog& catalog);
void write_catalog(const ConceptCatalog& catalog,
                   const std::filesystem::path& path);

CandidatePool read_candidate_pool(const std::filesystem::path& catalog_path,
                                  const std::filesystem::path& embeddings_path);

}  // namespace orca
