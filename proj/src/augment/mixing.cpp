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

#include "landslide/augment.hpp"
#include "landslide/error.hpp"

namespace landslide::augment {

double cutmix_lambda(const CutRect& rect, std::size_t width, std::size_t height) noexcept {
  return 1.0 - static_cast<double>(rect.area()) / static_cast<double>(width * height);
}

CutRect sample_cut_rect(std::size_t width, std::size_t height, Rng& rng) {
  // Two distinct corners per axis, drawn from {0..W} and {0..H}.
  auto axis = [&rng](std::size_t extent) {
    const std::uint64_t choices = extent + 1;
    const auto a = static_cast<std::size_t>(rng.below(choices));
    auto b = static_cast<std::size_t>(rng.below(choices - 1));
    if (b >= a) ++b;
    return std::pair{std::min(a, b), std::max(a, b)};
  };
  const auto [x1, x2] = axis(width);
  const auto [y1, y2] = axis(height);
  return {x1, x2, y1, y2};
}

MixResult cutmix_with_rect(const LabeledImage& a, const LabeledImage& b, const CutRect& rect) {
  require_same_shape(a.image, b.image, "cutmix");
  const std::size_t w = a.image.width();
  const std::size_t h = a.image.height();
  if (!(rect.x1 < rect.x2 && rect.x2 <= w && rect.y1 < rect.y2 && rect.y2 <= h)) {
    throw ArgumentError("cutmix: rectangle outside the image or empty");
  }
  MixResult r{a.image, a.label, cutmix_lambda(rect, w, h), rect};
  const std::size_t c = a.image.channels();
  for (std::size_t y = rect.y1; y < rect.y2; ++y) {
    const std::size_t off = (y * w + rect.x1) * c;
    std::copy_n(b.image.data().begin() + static_cast<std::ptrdiff_t>(off), (rect.x2 - rect.x1) * c,
                r.image.data().begin() + static_cast<std::ptrdiff_t>(off));
  }
  r.label = SoftLabel::mix(a.label, b.label, r.lambda);
  return r;
}

MixResult cutmix(const LabeledImage& a, const LabeledImage& b, Rng& rng) {
  require_same_shape(a.image, b.image, "cutmix");
  return cutmix_with_rect(a, b, sample_cut_rect(a.image.width(), a.image.height(), rng));
}

MixResult mixup_with_lambda(const LabeledImage& a, const LabeledImage& b, double lambda) {
  require_same_shape(a.image, b.image, "mixup");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ArgumentError("mixup: lambda must lie in [0, 1]");
  MixResult r{a.image, SoftLabel::mix(a.label, b.label, lambda), lambda, {}};
  auto o = r.image.data();
  const auto bd = b.image.data();
  const double mu = 1.0 - lambda;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double x = o[i];
    const double z = bd[i];
    o[i] = std::clamp(lambda * x + mu * z, std::min(x, z), std::max(x, z));
  }
  return r;
}

MixResult mixup(const LabeledImage& a, const LabeledImage& b, Rng& rng, double alpha) {
  require_same_shape(a.image, b.image, "mixup");
  if (!(alpha > 0.0)) throw ArgumentError("mixup: alpha must be positive");
  const double lambda = alpha == 1.0 ? rng.uniform() : rng.beta(alpha, alpha);
  return mixup_with_lambda(a, b, lambda);
}

}  // namespace landslide::augment
