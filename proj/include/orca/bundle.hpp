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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orca/catalog.hpp"
#include "orca/matrix.hpp"

namespace orca {

// An additional image set in a manifest, e.g. a training split used for
// concept selection.
struct ImageSplit {
  EmbeddingMatrix images;
  std::vector<int> labels;
};

// Everything needed to score one evaluation set. Instances returned by
// load_manifest or validate_bundle satisfy all cross-file invariants.
struct DatasetBundle {
  std::string dataset_id;
  std::string backbone_id;

  EmbeddingMatrix image_embeddings;
  std::vector<int> labels;
  std::vector<std::string> category_names;
  ConceptCatalog catalog;
  EmbeddingMatrix category_text_embeddings;
  EmbeddingMatrix concept_text_embeddings;
  std::vector<EmbeddingMatrix> template_text_embeddings;

  std::map<std::string, ImageSplit> splits;
  std::optional<CandidatePool> candidate_pool;

  std::size_t num_samples() const { return image_embeddings.rows(); }
  std::size_t num_categories() const { return category_names.size(); }
  std::size_t concepts_per_category() const {
    return catalog.concepts_per_category();
  }
};

// Throws ValidationError describing the first violated invariant: label
// range, image/label count, category names vs catalog, row counts of text
// matrices, and a shared embedding dimension.
void validate_bundle(const DatasetBundle& bundle);

// Manifest: a JSON object whose file fields are resolved relative to the
// manifest's directory.
//   images, labels, catalog, category_text, concept_text   (required)
//   categories              list of names, must match the catalog order
//   templates               optional list of tensor files
//   dataset, backbone       optional identifiers, echoed into reports
//   splits                  optional {name: {images, labels}}
//   candidate_pool          optional {catalog, embeddings}
DatasetBundle load_manifest(const std::filesystem::path& path);

// Labels files are JSON arrays of integers, one per image row.
std::vector<int> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const int> labels,
                  const std::filesystem::path& path);

// Relative file names used by write_bundle.
struct ManifestLayout {
  std::string images = "images.orcaemb";
  std::string labels = "labels.json";
  std::string catalog = "catalog.json";
  std::string category_text = "category_text.orcaemb";
  std::string concept_text = "concept_text.orcaemb";
  std::string template_prefix = "template_";
};

// Writes every bundle file plus manifest.json into `dir` and returns the
// manifest path. Splits and candidate pools are written too when present.
std::filesystem::path write_bundle(const DatasetBundle& bundle,
                                   const std::filesystem::path& dir,
                                   const ManifestLayout& layout = {});

}  // namespace orca
