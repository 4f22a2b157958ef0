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

#include <span>
#include <string>
#include <vector>

#include "landslide/image.hpp"

namespace landslide {

constexpr std::size_t kSsimWindow = 8;
constexpr double kSsimK1 = 0.01;
constexpr double kSsimK2 = 0.03;
constexpr double kSsimMinRange = 1e-6;

// Mean over bands of the windowed SSIM index. Windows are 8x8 and do not
// overlap; edge windows are truncated when a side is not a multiple of 8.
// The dynamic range of each band is max - min over both images.
double ssim(const MultiBandImage& a, const MultiBandImage& b);

// SSIM of one band, exposed for tests.
double ssim_band(const MultiBandImage& a, const MultiBandImage& b, std::size_t band);

enum class NormalizationMode { kStandard, kRobust };

std::string to_string(NormalizationMode mode);
NormalizationMode normalization_mode_from_string(const std::string& s);

struct NormalizationStats {
  NormalizationMode mode = NormalizationMode::kStandard;
  std::vector<double> center;
  std::vector<double> scale;

  std::size_t bands() const noexcept { return center.size(); }
  bool operator==(const NormalizationStats&) const = default;
};

// standard: mean / population std. robust: median / IQR with the linear
// interpolation ("type 7") quantile rule. A zero scale becomes 1.
NormalizationStats fit_normalization(std::span<const MultiBandImage> images, NormalizationMode mode);
// Same statistics over rows of a feature matrix (one "band" per column).
NormalizationStats fit_feature_normalization(std::span<const std::vector<double>> rows, NormalizationMode mode);

MultiBandImage apply_normalization(const MultiBandImage& img, const NormalizationStats& stats);
MultiBandImage invert_normalization(const MultiBandImage& img, const NormalizationStats& stats);
std::vector<double> apply_normalization(std::span<const double> row, const NormalizationStats& stats);

// Linear-interpolation quantile of an unsorted sample, q in [0,1].
double quantile_type7(std::vector<double> values, double q);

// Bilinear with half-pixel centers; source coordinates clamp at the border.
MultiBandImage resize_bilinear(const MultiBandImage& img, std::size_t out_h, std::size_t out_w);

MultiBandImage select_bands(const MultiBandImage& img, std::span<const std::size_t> bands);

}  // namespace landslide
