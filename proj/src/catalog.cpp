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

#include "orca/catalog.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/fs.hpp"
#include "orca/similarity.hpp"

namespace orca {

namespace {

void check_unique(const std::vector<CategoryConcepts>& categories) {
  std::set<std::string> names;
  for (const auto& cat : categories) {
    if (!names.insert(cat.name).second) {
      throw ValidationError("duplicate category name '" + cat.name + "'");
    }
    std::set<std::string> seen;
    for (const auto& c : cat.concepts) {
      if (!seen.insert(c).second) {
        throw ValidationError("duplicate concept '" + c + "' in category '" +
                              cat.name + "'");
      }
    }
  }
}

}  // namespace

ConceptCatalog::ConceptCatalog(std::vector<CategoryConcepts> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) {
    throw ValidationError("concept catalog has no categories");
  }
  k_ = categories_.front().concepts.size();
  if (k_ == 0) {
    throw ValidationError("category '" + categories_.front().name +
                          "' has no concepts");
  }
  for (const auto& cat : categories_) {
    if (cat.concepts.size() != k_) {
      throw ValidationError(
          "concept count must be identical across categories: '" +
          categories_.front().name + "' has " + std::to_string(k_) + ", '" +
          cat.name + "' has " + std::to_string(cat.concepts.size()));
    }
  }
  check_unique(categories_);
}

const std::string& ConceptCatalog::concept_name(
    std::size_t global_index) const {
  return categories_[global_index / k_].concepts[global_index % k_];
}

FlatConcepts flatten(const ConceptCatalog& catalog) {
  FlatConcepts flat;
  flat.concepts.reserve(catalog.num_concepts());
  flat.category_of.reserve(catalog.num_concepts());
  for (std::size_t c = 0; c < catalog.num_categories(); ++c) {
    for (const auto& concept_name : catalog.categories()[c].concepts) {
      flat.concepts.push_back(concept_name);
      flat.category_of.push_back(c);
    }
  }
  return flat;
}

std::vector<std::size_t> CandidatePool::offsets() const {
  std::vector<std::size_t> out(categories.size() + 1, 0);
  for (std::size_t c = 0; c < categories.size(); ++c) {
    out[c + 1] = out[c] + categories[c].concepts.size();
  }
  return out;
}

void CandidatePool::validate() const {
  if (categories.empty()) {
    throw ValidationError("candidate pool has no categories");
  }
  check_unique(categories);
  const std::size_t total = offsets().back();
  if (embeddings.rows() != total) {
    throw ValidationError("candidate pool lists " + std::to_string(total) +
                          " concepts but its embedding matrix has " +
                          std::to_string(embeddings.rows()) + " rows");
  }
}

SelectedConcepts select_top_concepts(const CandidatePool& pool,
                                     const EmbeddingMatrix& images,
                                     std::span<const int> labels,
                                     std::size_t k) {
  pool.validate();
  if (k == 0) {
    throw ParameterError("concept selection needs k >= 1");
  }
  if (labels.size() != images.rows()) {
    throw ValidationError("selection has " + std::to_string(images.rows()) +
                          " images but " + std::to_string(labels.size()) +
                          " labels");
  }
  if (images.cols() != pool.embeddings.cols()) {
    throw ShapeError("image dimension " + std::to_string(images.cols()) +
                     " differs from candidate dimension " +
                     std::to_string(pool.embeddings.cols()));
  }
  const std::size_t num_categories = pool.categories.size();
  std::vector<std::vector<std::size_t>> members(num_categories);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_categories) {
      throw ValidationError("label " + std::to_string(labels[i]) +
                            " at image " + std::to_string(i) +
                            " is outside [0, " +
                            std::to_string(num_categories) + ")");
    }
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  for (std::size_t c = 0; c < num_categories; ++c) {
    const auto& cat = pool.categories[c];
    if (members[c].empty()) {
      throw SelectionError("category '" + cat.name +
                           "' has no images to select concepts with");
    }
    if (cat.concepts.size() < k) {
      throw ValidationError("category '" + cat.name + "' has " +
                            std::to_string(cat.concepts.size()) +
                            " candidates, fewer than k = " + std::to_string(k));
    }
  }

  const TextBank bank(pool.embeddings);
  const auto offsets = pool.offsets();
  std::vector<CategoryConcepts> chosen(num_categories);
  std::vector<std::size_t> rows;
  std::vector<double> means_out;

  for (std::size_t c = 0; c < num_categories; ++c) {
    const auto& cat = pool.categories[c];
    const std::size_t n_cand = cat.concepts.size();
    std::vector<std::vector<double>> sims(n_cand);
    for (auto& s : sims) s.reserve(members[c].size());
    // Only the candidates of category c are needed per image.
    for (std::size_t img : members[c]) {
      const auto image = images.row(img);
      const double image_norm = l2_norm(image);
      if (!(image_norm >= kDegenerateNorm)) {
        throw DegenerateVectorError("image " + std::to_string(img) +
                                    " is a zero vector");
      }
      for (std::size_t j = 0; j < n_cand; ++j) {
        const auto text = pool.embeddings.row(offsets[c] + j);
        double d = 0.0;
        for (std::size_t t = 0; t < text.size(); ++t) {
          d += static_cast<double>(image[t]) * static_cast<double>(text[t]);
        }
        sims[j].push_back(kLogitScale *
                          (d / (image_norm * bank.norm(offsets[c] + j))));
      }
    }
    // Summing in sorted order makes the mean independent of image order.
    std::vector<double> means(n_cand);
    for (std::size_t j = 0; j < n_cand; ++j) {
      std::sort(sims[j].begin(), sims[j].end());
      double total = 0.0;
      for (double s : sims[j]) total += s;
      means[j] = total / static_cast<double>(sims[j].size());
    }
    std::vector<std::size_t> order(n_cand);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return means[a] > means[b];
                     });
    order.resize(k);
    std::sort(order.begin(), order.end());

    chosen[c].name = cat.name;
    for (std::size_t j : order) {
      chosen[c].concepts.push_back(cat.concepts[j]);
      rows.push_back(offsets[c] + j);
      means_out.push_back(means[j]);
    }
  }

  return {ConceptCatalog(std::move(chosen)), pool.embeddings.select_rows(rows),
          std::move(means_out)};
}

std::vector<CategoryConcepts> read_catalog_entries(
    const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<CategoryConcepts> out;
  try {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) {
      throw FormatError("catalog " + path.string() + " must be a JSON array");
    }
    for (const auto& entry : doc) {
      CategoryConcepts cat;
      cat.name = entry.at("name").get<std::string>();
      cat.concepts = entry.at("concepts").get<std::vector<std::string>>();
      out.push_back(std::move(cat));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed catalog " + path.string() + ": " + e.what());
  }
  return out;
}

ConceptCatalog read_catalog(const std::filesystem::path& path) {
  try {
    return ConceptCatalog(read_catalog_entries(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string catalog_to_json(const ConceptCatalog& catalog) {
  auto doc = nlohmann::json::array();
  for (const auto& cat : catalog.categories()) {
    doc.push_back({{"name", cat.name}, {"concepts", cat.concepts}});
  }
  return doc.dump(2) + "\n";
}

void write_catalog(const ConceptCatalog& catalog,
                   const std::filesystem::path& path) {
  write_file_atomic(path, catalog_to_json(catalog));
}

CandidatePool read_candidate_pool(const std::filesystem::path& catalog_path,
                                  const std::filesystem::path& embeddings_path) {
  CandidatePool pool{read_catalog_entries(catalog_path),
                     read_matrix(embeddings_path)};
  pool.validate();
  return pool;
}

}  // namespace orca
