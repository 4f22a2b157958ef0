/**
 * Copyright 2026 The Landslide Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landslide/image.hpp"

namespace landslide {

struct ManifestRow {
  std::string id;
  std::string path;  // as written; relative paths resolve against the manifest directory
  std::optional<int> label;
  std::optional<int> fold;
  // Provenance of SMOTE synthetics.
  std::optional<std::string> anchor_id;
  std::optional<std::string> neighbor_id;
  std::optional<double> lambda;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestRow> rows;

  std::filesystem::path resolve(const ManifestRow& row) const;
  bool has_folds() const noexcept;
  bool has_provenance() const noexcept;
};

// Columns: id,path[,label][,fold][,anchor_id,neighbor_id,lambda]. Labels are
// required unless `labels_optional`; every referenced file must exist.
DatasetManifest read_manifest(const std::filesystem::path& path, bool labels_optional = false);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct Sample {
  std::string id;
  MultiBandImage image;
  int label = -1;  // -1 when unknown
  int fold = -1;
};

// Reads every image, keeps `bands` (empty = all) and resizes to
// size x size (0 = keep the stored size).
std::vector<Sample> load_samples(const DatasetManifest& manifest, std::span<const std::size_t> bands,
                                 std::size_t size);

}  // namespace landslide
