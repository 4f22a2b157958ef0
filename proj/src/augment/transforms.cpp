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
#include <algorithm>
#include <cmath>
#include <numeric>

#include "landslide/augment.hpp"
#include "landslide/error.hpp"

namespace landslide::augment {

MultiBandImage flip_horizontal(const MultiBandImage& img) {
  MultiBandImage out = img;
  const std::size_t w = img.width();
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      for (std::size_t b = 0; b < img.channels(); ++b) out.at(y, x, b) = img.at(y, w - 1 - x, b);
    }
  }
  return out;
}

MultiBandImage flip_vertical(const MultiBandImage& img) {
  MultiBandImage out = img;
  const std::size_t h = img.height();
  const std::size_t row = img.width() * img.channels();
  for (std::size_t y = 0; y < h; ++y) {
    std::copy_n(img.data().begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * row), row,
                out.data().begin() + static_cast<std::ptrdiff_t>(y * row));
  }
  return out;
}

MultiBandImage rotate90(const MultiBandImage& img, int k) {
  k = ((k % 4) + 4) % 4;
  if (k == 0) return img;
  if (k == 2) return flip_vertical(flip_horizontal(img));
  const std::size_t h = img.height();
  const std::size_t w = img.width();
  MultiBandImage out(w, h, img.channels());
  for (std::size_t y = 0; y < w; ++y) {
    for (std::size_t x = 0; x < h; ++x) {
      // Counter-clockwise: out(y, x) = in(x, w-1-y); clockwise is the mirror.
      const std::size_t sy = k == 1 ? x : h - 1 - x;
      const std::size_t sx = k == 1 ? w - 1 - y : y;
      for (std::size_t b = 0; b < img.channels(); ++b) out.at(y, x, b) = img.at(sy, sx, b);
    }
  }
  return out;
}

MultiBandImage shift(const MultiBandImage& img, int dy, int dx) {
  MultiBandImage out(img.height(), img.width(), img.channels(), 0.0);
  const auto h = static_cast<long>(img.height());
  const auto w = static_cast<long>(img.width());
  for (long y = 0; y < h; ++y) {
    const long sy = y - dy;
    if (sy < 0 || sy >= h) continue;
    for (long x = 0; x < w; ++x) {
      const long sx = x - dx;
      if (sx < 0 || sx >= w) continue;
      for (std::size_t b = 0; b < img.channels(); ++b) {
        out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), b) =
            img.at(static_cast<std::size_t>(sy), static_cast<std::size_t>(sx), b);
      }
    }
  }
  return out;
}

MultiBandImage shear(const MultiBandImage& img, double factor) {
  if (factor == 0.0) return img;
  MultiBandImage out(img.height(), img.width(), img.channels(), 0.0);
  const auto w = static_cast<long>(img.width());
  const double cy = 0.5 * static_cast<double>(img.height() - 1);
  for (std::size_t y = 0; y < img.height(); ++y) {
    const double offset = factor * (static_cast<double>(y) - cy);
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double src = static_cast<double>(x) - offset;
      const double fl = std::floor(src);
      const double f = src - fl;
      const auto x0 = static_cast<long>(fl);
      for (std::size_t b = 0; b < img.channels(); ++b) {
        const double v0 = (x0 >= 0 && x0 < w) ? img.at(y, static_cast<std::size_t>(x0), b) : 0.0;
        const double v1 = (x0 + 1 >= 0 && x0 + 1 < w) ? img.at(y, static_cast<std::size_t>(x0 + 1), b) : 0.0;
        out.at(y, x, b) = v0 + f * (v1 - v0);
      }
    }
  }
  return out;
}

namespace {

void check_prob(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError(std::string("augment policy: ") + name + " must lie in [0, 1]");
}

struct BandMoments {
  std::vector<double> mean;
  std::vector<double> std;
};

BandMoments band_moments(const MultiBandImage& img) {
  const std::size_t c = img.channels();
  BandMoments m{std::vector<double>(c, 0.0), std::vector<double>(c, 0.0)};
  const auto d = img.data();
  for (std::size_t i = 0; i < d.size(); ++i) m.mean[i % c] += d[i];
  for (auto& v : m.mean) v /= static_cast<double>(img.pixels());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = d[i] - m.mean[i % c];
    m.std[i % c] += e * e;
  }
  for (auto& v : m.std) v = std::sqrt(v / static_cast<double>(img.pixels()));
  return m;
}

void color_transforms(MultiBandImage& img, const AugmentPolicy& p, Rng& rng) {
  const std::size_t c = img.channels();
  if (rng.bernoulli(p.noise_prob)) {
    const auto m = band_moments(img);
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += p.noise_sigma * m.std[i % c] * rng.normal();
  }
  if (rng.bernoulli(p.brightness_prob)) {
    const auto m = band_moments(img);
    const double delta = rng.uniform(-p.brightness_delta, p.brightness_delta);
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += delta * (m.std[i % c] > 0.0 ? m.std[i % c] : 1.0);
  }
  if (rng.bernoulli(p.contrast_prob)) {
    const auto m = band_moments(img);
    const double gain = 1.0 + rng.uniform(-p.contrast_delta, p.contrast_delta);
    auto d = img.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = m.mean[i % c] + (d[i] - m.mean[i % c]) * gain;
  }
  // Saturation is only meaningful for an optical triple.
  if (p.rgb_bands.size() == 3 && rng.bernoulli(p.saturation_prob)) {
    const double gain = 1.0 + rng.uniform(-p.saturation_delta, p.saturation_delta);
    for (std::size_t px = 0; px < img.pixels(); ++px) {
      double* pix = img.data().data() + px * c;
      const double gray = (pix[p.rgb_bands[0]] + pix[p.rgb_bands[1]] + pix[p.rgb_bands[2]]) / 3.0;
      for (std::size_t band : p.rgb_bands) pix[band] = gray + (pix[band] - gray) * gain;
    }
  }
}

void geometric_transforms(MultiBandImage& img, const AugmentPolicy& p, Rng& rng) {
  if (rng.bernoulli(p.hflip_prob)) img = flip_horizontal(img);
  if (rng.bernoulli(p.vflip_prob)) img = flip_vertical(img);
  if (rng.bernoulli(p.rot90_prob)) {
    // Quarter turns would change the shape of a non-square image.
    const int k = img.height() == img.width() ? 1 + static_cast<int>(rng.below(3)) : 2;
    img = rotate90(img, k);
  }
  if (rng.bernoulli(p.shift_prob) && p.shift_max > 0) {
    const auto span = static_cast<std::uint64_t>(2 * p.shift_max + 1);
    const int dy = static_cast<int>(rng.below(span)) - p.shift_max;
    const int dx = static_cast<int>(rng.below(span)) - p.shift_max;
    img = shift(img, dy, dx);
  }
  if (rng.bernoulli(p.shear_prob)) img = shear(img, rng.uniform(-p.shear_max, p.shear_max));
}

}  // namespace

void AugmentPolicy::validate() const {
  check_prob(noise_prob, "noise_prob");
  check_prob(brightness_prob, "brightness_prob");
  check_prob(contrast_prob, "contrast_prob");
  check_prob(saturation_prob, "saturation_prob");
  check_prob(hflip_prob, "hflip_prob");
  check_prob(vflip_prob, "vflip_prob");
  check_prob(rot90_prob, "rot90_prob");
  check_prob(shift_prob, "shift_prob");
  check_prob(shear_prob, "shear_prob");
  check_prob(cutmix_prob, "cutmix_prob");
  check_prob(mixup_prob, "mixup_prob");
  if (cutmix_prob + mixup_prob > 1.0) throw ArgumentError("augment policy: cutmix_prob + mixup_prob must not exceed 1");
  if (noise_sigma < 0.0 || brightness_delta < 0.0 || contrast_delta < 0.0 || saturation_delta < 0.0 ||
      shear_max < 0.0 || shift_max < 0) {
    throw ArgumentError("augment policy: magnitudes must be non-negative");
  }
  if (contrast_delta >= 1.0) throw ArgumentError("augment policy: contrast_delta must be below 1");
  if (!(mixup_alpha > 0.0)) throw ArgumentError("augment policy: mixup_alpha must be positive");
  if (!rgb_bands.empty() && rgb_bands.size() != 3) throw ArgumentError("augment policy: rgb_bands needs three indices");
}

AugmentPolicy AugmentPolicy::defaults() {
  AugmentPolicy p;
  p.noise_prob = 0.2;
  p.brightness_prob = 0.2;
  p.contrast_prob = 0.2;
  p.saturation_prob = 0.2;
  p.hflip_prob = 0.5;
  p.vflip_prob = 0.5;
  p.rot90_prob = 0.5;
  p.shift_prob = 0.2;
  p.shear_prob = 0.1;
  p.cutmix_prob = 0.25;
  p.mixup_prob = 0.25;
  return p;
}

std::vector<LabeledImage> apply_policy(std::vector<LabeledImage> batch, const AugmentPolicy& policy, Rng& rng) {
  if (batch.empty()) throw ArgumentError("apply_policy: empty batch");
  policy.validate();
  for (const auto& s : batch) require_same_shape(batch.front().image, s.image, "apply_policy");
  for (std::size_t b : policy.rgb_bands) {
    if (b >= batch.front().image.channels()) throw ArgumentError("augment policy: rgb band out of range");
  }

  for (auto& s : batch) {
    color_transforms(s.image, policy, rng);
    geometric_transforms(s.image, policy, rng);
  }
  if (!policy.mixing_enabled()) return batch;

  const double u = rng.uniform();
  const bool use_cutmix = u < policy.cutmix_prob;
  const bool use_mixup = !use_cutmix && u < policy.cutmix_prob + policy.mixup_prob;
  if (!use_cutmix && !use_mixup) return batch;

  std::vector<std::size_t> partner(batch.size());
  std::iota(partner.begin(), partner.end(), 0);
  rng.shuffle(std::span<std::size_t>(partner));

  // Mix against the pre-mix batch so pairs do not chain.
  const std::vector<LabeledImage> source = batch;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& other = source[partner[i]];
    MixResult r = use_cutmix ? cutmix(source[i], other, rng) : mixup(source[i], other, rng, policy.mixup_alpha);
    batch[i] = {std::move(r.image), r.label};
  }
  return batch;
}

}  // namespace landslide::augment
