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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "landslide/augment.hpp"
#include "landslide/core.hpp"
#include "landslide/model.hpp"
#include "landslide/svm.hpp"

namespace landslide {

struct ScheduleSettings {
  model::ScheduleKind kind = model::ScheduleKind::kCosine;
  int t_max = 0;  // 0 means the number of epochs
  double eta_min = 0.0;
  int period = 15;
  double decay = 0.1;
};

struct ModelSettings {
  std::vector<int> conv_channels{16, 32};
  int kernel = 3;
  int embedding_dim = 64;
};

struct SmoteSettings {
  bool enabled = true;
  std::size_t k_neighbors = 5;
  std::optional<std::size_t> n_syn;  // nullopt = balance the classes
  double clip_lo = 0.1;
  double clip_hi = 0.9;
  double beta_alpha = 2.0;
  double beta_beta = 2.0;
  std::size_t max_candidates = 0;
};

// Everything a run needs. Serialized as JSON; unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 42;
  int image_size = 256;
  std::vector<std::size_t> bands;  // empty = all bands in file order
  std::vector<std::string> band_names;
  int epochs = 50;
  std::size_t batch_size = 36;
  double base_lr = 3e-4;
  NormalizationMode normalization = NormalizationMode::kStandard;
  int k_folds = 5;
  bool paper_mode = false;  // SMOTE before fold splitting
  int val_fold = -1;        // manifest fold used for validation by train, -1 = none
  ScheduleSettings schedule;
  ModelSettings model;
  augment::AugmentPolicy augment = augment::AugmentPolicy::defaults();
  SmoteSettings smote;
  svm::SvmConfig svm{0.1, std::nullopt, 1e-3, 10, 100000};

  void validate() const;

  model::LrSchedule lr_schedule() const;
  model::TrainOptions train_options() const;
  model::CnnConfig cnn_config(int input_channels) const;
  // Resolves n_syn = auto against the class counts.
  augment::SmoteConfig smote_config(std::size_t minority, std::size_t majority) const;
};

std::string config_to_json(const RunConfig& cfg);

// Builds a config from defaults, then the file (if any), then the override
// document. Later sources win key by key. `source` names the file in errors.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file, std::string_view overrides_json = "{}");
RunConfig parse_config(std::string_view json, std::string_view source = "config");

}  // namespace landslide
