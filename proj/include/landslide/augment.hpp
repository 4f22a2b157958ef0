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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "landslide/image.hpp"
#include "landslide/rng.hpp"

namespace landslide::augment {

struct LabeledImage {
  MultiBandImage image;
  SoftLabel label;
};

// Offline oversampling: SMOTE with SSIM-ranked neighbours.
struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::size_t n_syn = 1;
  double clip_lo = 0.1;
  double clip_hi = 0.9;
  double beta_alpha = 2.0;
  double beta_beta = 2.0;
  // Compare each anchor with at most this many random candidates; 0 = all.
  std::size_t max_candidates = 0;
  // Test hook: bypass the Beta draw (the value is still clipped).
  std::optional<double> fixed_lambda;

  // Throws ArgumentError on out-of-range fields.
  void validate() const;
};

struct SyntheticImage {
  MultiBandImage image;
  std::size_t anchor = 0;    // index into the minority set
  std::size_t neighbor = 0;  // index into the minority set
  double lambda = 0.0;       // weight of the anchor after clipping
  double raw_lambda = 0.0;   // Beta draw before clipping
};

double clip_lambda(double lambda, double lo, double hi) noexcept;

// Indices of the k images most similar to `anchor` (highest SSIM, ties to
// the lower index) among `candidates`.
std::vector<std::size_t> ssim_neighbors(std::span<const MultiBandImage> images, std::size_t anchor,
                                        std::size_t k, std::span<const std::size_t> candidates);

// lambda * anchor + (1 - lambda) * neighbor, kept inside the parents' interval.
MultiBandImage interpolate(const MultiBandImage& anchor, const MultiBandImage& neighbor, double lambda);

// Emits minority.size() * cfg.n_syn synthetics, anchor-major.
std::vector<SyntheticImage> smote_ssim(std::span<const MultiBandImage> minority, const SmoteConfig& cfg, Rng& rng);

// Online mixing.
struct CutRect {
  std::size_t x1 = 0, x2 = 0;  // columns, 0 <= x1 < x2 <= W
  std::size_t y1 = 0, y2 = 0;  // rows, 0 <= y1 < y2 <= H
  std::size_t area() const noexcept { return (x2 - x1) * (y2 - y1); }
};

struct MixResult {
  MultiBandImage image;
  SoftLabel label;
  double lambda = 1.0;
  CutRect rect;  // cutmix only
};

double cutmix_lambda(const CutRect& rect, std::size_t width, std::size_t height) noexcept;
CutRect sample_cut_rect(std::size_t width, std::size_t height, Rng& rng);
MixResult cutmix(const LabeledImage& a, const LabeledImage& b, Rng& rng);
MixResult cutmix_with_rect(const LabeledImage& a, const LabeledImage& b, const CutRect& rect);

MixResult mixup(const LabeledImage& a, const LabeledImage& b, Rng& rng, double alpha = 1.0);
MixResult mixup_with_lambda(const LabeledImage& a, const LabeledImage& b, double lambda);

// Geometric transforms.
MultiBandImage flip_horizontal(const MultiBandImage& img);
MultiBandImage flip_vertical(const MultiBandImage& img);
// Counter-clockwise by k quarter turns; odd k requires a square image.
MultiBandImage rotate90(const MultiBandImage& img, int k);
// Integer translation with zero fill; positive dy moves content down.
MultiBandImage shift(const MultiBandImage& img, int dy, int dx);
// Horizontal shear x' = x + factor * (y - cy), bilinear with zero padding.
MultiBandImage shear(const MultiBandImage& img, double factor);

struct AugmentPolicy {
  double noise_prob = 0.0;
  double noise_sigma = 0.05;  // fraction of each band's std
  double brightness_prob = 0.0;
  double brightness_delta = 0.1;
  double contrast_prob = 0.0;
  double contrast_delta = 0.1;
  double saturation_prob = 0.0;
  double saturation_delta = 0.1;
  std::vector<std::size_t> rgb_bands;  // saturation runs only with exactly three bands here
  double hflip_prob = 0.0;
  double vflip_prob = 0.0;
  double rot90_prob = 0.0;
  double shift_prob = 0.0;
  int shift_max = 4;
  double shear_prob = 0.0;
  double shear_max = 0.1;
  double cutmix_prob = 0.0;
  double mixup_prob = 0.0;
  double mixup_alpha = 1.0;

  void validate() const;
  bool mixing_enabled() const noexcept { return cutmix_prob > 0.0 || mixup_prob > 0.0; }

  static AugmentPolicy none() { return {}; }
  // The bag-of-freebies defaults used by the training pipeline.
  static AugmentPolicy defaults();
};

// Per-sample colour and geometric transforms, then at most one of
// CutMix/Mixup over random in-batch pairs.
std::vector<LabeledImage> apply_policy(std::vector<LabeledImage> batch, const AugmentPolicy& policy, Rng& rng);

}  // namespace landslide::augment
