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
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "landslide/metrics.hpp"
#include "landslide/pipeline.hpp"

namespace landslide::eval {

struct FoldPlan {
  int k = 0;
  std::vector<int> assignment;  // sample index -> fold

  std::vector<std::size_t> members(int fold) const;
  std::vector<std::size_t> complement(int fold) const;
};

// Stratified: each class is shuffled and dealt round-robin, with the dealing
// offset carried across classes so fold sizes stay within one of each other.
FoldPlan make_folds(std::span<const int> labels, int k, Rng& rng);

struct FoldResult {
  int fold = 0;
  std::size_t n_train = 0;
  std::size_t n_val = 0;
  ConfusionCounts fc;
  ConfusionCounts svm;
  double fc_f1 = 0.0;
  double svm_f1 = 0.0;
  int best_epoch = -1;
  std::vector<SyntheticRecord> synthetics;
  std::vector<std::string> train_ids;
};

struct CrossValResult {
  FoldPlan plan;
  std::vector<FoldResult> folds;
  double mean_fc_f1 = 0.0;
  double mean_svm_f1 = 0.0;
};

using FoldCallback = std::function<void(const FoldResult&, const FittedPipeline&)>;

// Normalization and SMOTE are fit on the training folds only, unless
// cfg.paper_mode asks for SMOTE over the whole set before splitting.
CrossValResult cross_validate(std::span<const Sample> samples, const RunConfig& cfg, Rng& rng,
                              const FoldCallback& on_fold = {});

struct OcclusionEntry {
  std::size_t band = 0;
  std::string name;
  double cumulative_drop = 0.0;          // sum of p_orig - p_occluded
  double mean_drop = 0.0;
  double cumulative_drop_assumed = 0.0;  // sum of 1 - p_occluded
  std::size_t rank = 0;                  // 1 = most important
};

struct OcclusionReport {
  std::vector<OcclusionEntry> bands;  // sorted by rank
  std::size_t n_images = 0;
  double mean_p_orig = 0.0;
  double mean_p_all_occluded = 0.0;
  double p_zero_input = 0.0;
  std::string head;
  double logistic_scale = 0.0;  // 0 for the softmax head
};

using ProbabilityFn = std::function<std::vector<double>(std::span<const MultiBandImage>)>;

// Zeroes one band at a time in model-input space and accumulates the drop in
// landslide probability over `images`.
OcclusionReport occlusion_importance(const ProbabilityFn& probability, std::span<const MultiBandImage> images,
                                     std::span<const std::string> band_names = {});

void write_occlusion_csv(const std::filesystem::path& path, const OcclusionReport& report);
void write_occlusion_svg(const std::filesystem::path& path, const OcclusionReport& report);
void write_folds_csv(const std::filesystem::path& path, const CrossValResult& result);
void write_epoch_log_csv(const std::filesystem::path& path, std::span<const model::EpochMetrics> log);
void write_synthetics_csv(const std::filesystem::path& path, std::span<const SyntheticRecord> records);
// id,label,e_0..e_{D-1}
void export_embeddings(const std::filesystem::path& path, std::span<const Sample> samples,
                       std::span<const std::vector<double>> embeddings);

// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace landslide::eval
