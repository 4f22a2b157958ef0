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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landslide/config.hpp"
#include "landslide/dataset.hpp"
#include "landslide/metrics.hpp"
#include "landslide/model.hpp"
#include "landslide/svm.hpp"

namespace landslide {

// Input preparation that travels with a checkpoint.
struct Preprocess {
  std::vector<std::size_t> bands;  // indices into the stored image, empty = all
  std::vector<std::string> band_names;
  std::size_t image_size = 0;
  NormalizationStats norm;
};

std::string preprocess_to_json(const Preprocess& p);
Preprocess preprocess_from_json(const std::string& meta_json);

// Normalizes raw (band-selected, resized) samples.
std::vector<MultiBandImage> normalized_images(std::span<const Sample> samples, const NormalizationStats& norm);

struct SyntheticRecord {
  std::string id;
  std::string anchor_id;
  std::string neighbor_id;
  double lambda = 0.0;
};

struct OversampleResult {
  std::vector<Sample> synthetic;
  std::vector<SyntheticRecord> records;
  int minority_label = 1;
};

// SSIM-guided SMOTE on the smaller class of `samples`.
OversampleResult oversample(std::span<const Sample> samples, const RunConfig& cfg, Rng& rng);

struct FittedPipeline {
  model::CompactCnn net;
  NormalizationStats norm;
  std::optional<svm::SvmModel> head;
  std::vector<model::EpochMetrics> log;
  int best_epoch = -1;
  std::vector<SyntheticRecord> synthetics;
};

struct FitOptions {
  bool smote = true;
  bool svm_head = true;
  std::function<void(const model::EpochMetrics&)> on_epoch;
};

// Fits normalization, optional SMOTE, the backbone (best epoch by F1 on
// `validation` when non-empty) and the SVM head. Uses only `train` for
// every statistic.
FittedPipeline fit_pipeline(std::span<const Sample> train, std::span<const Sample> validation, const RunConfig& cfg,
                            Rng& rng, const FitOptions& options = {});

// Landslide probabilities and labels on normalized images.
std::vector<double> fc_probabilities(const model::CompactCnn& net, std::span<const MultiBandImage> images);
std::vector<std::vector<double>> embeddings(const model::CompactCnn& net, std::span<const MultiBandImage> images);
std::vector<double> svm_decisions(const model::CompactCnn& net, const svm::SvmModel& head,
                                  std::span<const MultiBandImage> images);
// Logistic squashing of SVM scores, sigma(a * f).
constexpr double kSvmLogisticScale = 1.0;
double svm_probability(double decision) noexcept;

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted);
std::vector<int> labels_of(std::span<const Sample> samples);

}  // namespace landslide
