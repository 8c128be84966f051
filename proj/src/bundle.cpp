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

#include "orca/bundle.hpp"

#include <string>

#include <json.hpp>

#include "orca/errors.hpp"
#include "orca/fs.hpp"

namespace orca {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shape(const EmbeddingMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_labels(std::span<const int> labels, std::size_t num_categories,
                  const std::string& what) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_categories) {
      throw ValidationError(what + " label " + std::to_string(labels[i]) +
                            " at index " + std::to_string(i) +
                            " is outside [0, " +
                            std::to_string(num_categories) + ")");
    }
  }
}

void check_cols(const EmbeddingMatrix& m, std::size_t dim,
                const std::string& what) {
  if (m.cols() != dim) {
    throw ValidationError(what + " has shape " + shape(m) +
                          " but image embeddings have dimension " +
                          std::to_string(dim));
  }
}

// Resolves a required string field of the manifest to an existing file.
fs::path resolve(const json& doc, const std::string& field,
                 const fs::path& base) {
  if (!doc.contains(field) || !doc.at(field).is_string()) {
    throw ResolutionError("manifest field '" + field +
                          "' is missing or not a path");
  }
  fs::path p = base / doc.at(field).get<std::string>();
  if (!fs::exists(p)) {
    throw ResolutionError("manifest field '" + field +
                          "' refers to missing file " + p.string());
  }
  return p;
}

fs::path resolve_string(const json& value, const std::string& field,
                        const fs::path& base) {
  if (!value.is_string()) {
    throw ResolutionError("manifest field '" + field + "' must be a path");
  }
  fs::path p = base / value.get<std::string>();
  if (!fs::exists(p)) {
    throw ResolutionError("manifest field '" + field +
                          "' refers to missing file " + p.string());
  }
  return p;
}

}  // namespace

void validate_bundle(const DatasetBundle& b) {
  const std::size_t num_categories = b.category_names.size();
  if (num_categories == 0) {
    throw ValidationError("bundle has no categories");
  }
  if (b.image_embeddings.empty()) {
    throw ValidationError("bundle has no image embeddings");
  }
  if (b.labels.size() != b.image_embeddings.rows()) {
    throw ValidationError("labels has " + std::to_string(b.labels.size()) +
                          " entries but images has shape " +
                          shape(b.image_embeddings));
  }
  check_labels(b.labels, num_categories, "image");

  if (b.catalog.num_categories() != num_categories) {
    throw ValidationError("catalog has " +
                          std::to_string(b.catalog.num_categories()) +
                          " categories but the manifest lists " +
                          std::to_string(num_categories));
  }
  for (std::size_t c = 0; c < num_categories; ++c) {
    if (b.catalog.category_name(c) != b.category_names[c]) {
      throw ValidationError("category " + std::to_string(c) + " is '" +
                            b.category_names[c] + "' in the manifest but '" +
                            b.catalog.category_name(c) + "' in the catalog");
    }
  }

  const std::size_t dim = b.image_embeddings.cols();
  if (b.category_text_embeddings.rows() != num_categories) {
    throw ValidationError("category_text has shape " +
                          shape(b.category_text_embeddings) + ", expected " +
                          std::to_string(num_categories) + " rows");
  }
  check_cols(b.category_text_embeddings, dim, "category_text");

  if (b.concept_text_embeddings.rows() != b.catalog.num_concepts()) {
    throw ValidationError(
        "concept_text has shape " + shape(b.concept_text_embeddings) +
        " but the catalog declares " + std::to_string(num_categories) + " x " +
        std::to_string(b.catalog.concepts_per_category()) + " concepts");
  }
  check_cols(b.concept_text_embeddings, dim, "concept_text");

  for (std::size_t t = 0; t < b.template_text_embeddings.size(); ++t) {
    const auto& m = b.template_text_embeddings[t];
    const std::string what = "template " + std::to_string(t);
    if (m.rows() != num_categories) {
      throw ValidationError(what + " has shape " + shape(m) + ", expected " +
                            std::to_string(num_categories) + " rows");
    }
    check_cols(m, dim, what);
  }

  for (const auto& [name, split] : b.splits) {
    if (split.labels.size() != split.images.rows()) {
      throw ValidationError("split '" + name + "' has " +
                            std::to_string(split.labels.size()) +
                            " labels for images of shape " +
                            shape(split.images));
    }
    check_labels(split.labels, num_categories, "split '" + name + "'");
    check_cols(split.images, dim, "split '" + name + "'");
  }

  if (b.candidate_pool) {
    const auto& pool = *b.candidate_pool;
    pool.validate();
    if (pool.categories.size() != num_categories) {
      throw ValidationError("candidate pool has " +
                            std::to_string(pool.categories.size()) +
                            " categories, expected " +
                            std::to_string(num_categories));
    }
    for (std::size_t c = 0; c < num_categories; ++c) {
      if (pool.categories[c].name != b.category_names[c]) {
        throw ValidationError("candidate pool category " + std::to_string(c) +
                              " is '" + pool.categories[c].name +
                              "', expected '" + b.category_names[c] + "'");
      }
    }
    check_cols(pool.embeddings, dim, "candidate pool");
  }
}

std::vector<int> read_labels(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text).get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw FormatError("labels file " + path.string() +
                      " must be a JSON list of integers: " + e.what());
  }
}

void write_labels(std::span<const int> labels, const fs::path& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(labels[i]);
  }
  out += "]\n";
  write_file_atomic(path, out);
}

DatasetBundle load_manifest(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError("manifest " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  if (!doc.is_object()) {
    throw FormatError("manifest " + path.string() + " must be a JSON object");
  }
  const fs::path base = path.parent_path();

  DatasetBundle b;
  b.dataset_id = doc.value("dataset", std::string{});
  b.backbone_id = doc.value("backbone", std::string{});

  // Resolve every path before reading any of them.
  const fs::path images = resolve(doc, "images", base);
  const fs::path labels = resolve(doc, "labels", base);
  const fs::path catalog = resolve(doc, "catalog", base);
  const fs::path category_text = resolve(doc, "category_text", base);
  const fs::path concept_text = resolve(doc, "concept_text", base);
  std::vector<fs::path> templates;
  if (doc.contains("templates")) {
    if (!doc.at("templates").is_array()) {
      throw FormatError("manifest field 'templates' must be a list");
    }
    for (const auto& t : doc.at("templates")) {
      templates.push_back(resolve_string(t, "templates", base));
    }
  }

  try {
    b.category_names = doc.at("categories").get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw FormatError("manifest field 'categories' must be a list of names");
  }

  b.image_embeddings = read_matrix(images);
  b.labels = read_labels(labels);
  b.catalog = read_catalog(catalog);
  b.category_text_embeddings = read_matrix(category_text);
  b.concept_text_embeddings = read_matrix(concept_text);
  for (const auto& t : templates) {
    b.template_text_embeddings.push_back(read_matrix(t));
  }

  if (doc.contains("splits")) {
    for (const auto& [name, entry] : doc.at("splits").items()) {
      const std::string field = "splits." + name;
      if (!entry.is_object()) {
        throw FormatError("manifest field '" + field + "' must be an object");
      }
      ImageSplit split;
      split.images = read_matrix(resolve(entry, "images", base));
      split.labels = read_labels(resolve(entry, "labels", base));
      b.splits.emplace(name, std::move(split));
    }
  }
  if (doc.contains("candidate_pool")) {
    const auto& entry = doc.at("candidate_pool");
    b.candidate_pool = read_candidate_pool(resolve(entry, "catalog", base),
                                           resolve(entry, "embeddings", base));
  }

  validate_bundle(b);
  return b;
}

fs::path write_bundle(const DatasetBundle& b, const fs::path& dir,
                      const ManifestLayout& layout) {
  validate_bundle(b);
  fs::create_directories(dir);

  json doc;
  if (!b.dataset_id.empty()) doc["dataset"] = b.dataset_id;
  if (!b.backbone_id.empty()) doc["backbone"] = b.backbone_id;
  doc["images"] = layout.images;
  doc["labels"] = layout.labels;
  doc["categories"] = b.category_names;
  doc["catalog"] = layout.catalog;
  doc["category_text"] = layout.category_text;
  doc["concept_text"] = layout.concept_text;

  write_matrix(b.image_embeddings, dir / layout.images);
  write_labels(b.labels, dir / layout.labels);
  write_catalog(b.catalog, dir / layout.catalog);
  write_matrix(b.category_text_embeddings, dir / layout.category_text);
  write_matrix(b.concept_text_embeddings, dir / layout.concept_text);

  if (!b.template_text_embeddings.empty()) {
    doc["templates"] = json::array();
    for (std::size_t t = 0; t < b.template_text_embeddings.size(); ++t) {
      const std::string name =
          layout.template_prefix + std::to_string(t) + ".orcaemb";
      write_matrix(b.template_text_embeddings[t], dir / name);
      doc["templates"].push_back(name);
    }
  }
  for (const auto& [name, split] : b.splits) {
    const std::string images = "split_" + name + "_images.orcaemb";
    const std::string labels = "split_" + name + "_labels.json";
    write_matrix(split.images, dir / images);
    write_labels(split.labels, dir / labels);
    doc["splits"][name] = {{"images", images}, {"labels", labels}};
  }
  if (b.candidate_pool) {
    const auto& pool = *b.candidate_pool;
    auto cats = json::array();
    for (const auto& cat : pool.categories) {
      cats.push_back({{"name", cat.name}, {"concepts", cat.concepts}});
    }
    write_file_atomic(dir / "pool_catalog.json", cats.dump(2) + "\n");
    write_matrix(pool.embeddings, dir / "pool_embeddings.orcaemb");
    doc["candidate_pool"] = {{"catalog", "pool_catalog.json"},
                             {"embeddings", "pool_embeddings.orcaemb"}};
  }

  const fs::path manifest = dir / "manifest.json";
  write_file_atomic(manifest, doc.dump(2) + "\n");
  return manifest;
}

}  // namespace orca
