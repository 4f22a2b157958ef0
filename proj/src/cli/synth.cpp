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
#include "landslide/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "landslide/error.hpp"
#include "landslide/rng.hpp"

namespace landslide {

namespace {

void add_bump(MultiBandImage& img, std::size_t band, double cy, double cx, double sigma, double amp) {
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t y = 0; y < img.height(); ++y) {
    for (std::size_t x = 0; x < img.width(); ++x) {
      const double dy = static_cast<double>(y) - cy;
      const double dx = static_cast<double>(x) - cx;
      img.at(y, x, band) += amp * std::exp(-(dy * dy + dx * dx) * inv);
    }
  }
}

}  // namespace

void SynthOptions::validate() const {
  if (count < 2 || size < 8 || bands == 0) throw ArgumentError("make-synth: need count >= 2, size >= 8, bands >= 1");
  if (!(imbalance >= 1.0)) throw ArgumentError("make-synth: imbalance must be at least 1");
  if (!(noise >= 0.0) || !(amplitude > 0.0)) throw ArgumentError("make-synth: noise and amplitude must be positive");
  if (signal_bands.empty()) throw ArgumentError("make-synth: at least one signal band is required");
  for (std::size_t b : signal_bands) {
    if (b >= bands) throw ArgumentError("make-synth: signal band out of range");
    if (dead_band && b == *dead_band) throw ArgumentError("make-synth: the dead band cannot carry signal");
  }
  if (dead_band && *dead_band >= bands) throw ArgumentError("make-synth: dead band out of range");
}

std::vector<SynthSample> make_synth(const SynthOptions& o) {
  o.validate();
  const auto positives = static_cast<std::size_t>(
      std::max(1.0, std::round(static_cast<double>(o.count) / (1.0 + o.imbalance))));
  std::vector<std::size_t> distractors;
  for (std::size_t b = 0; b < o.bands; ++b) {
    const bool signal = std::find(o.signal_bands.begin(), o.signal_bands.end(), b) != o.signal_bands.end();
    if (!signal && b != o.dead_band.value_or(o.bands)) distractors.push_back(b);
  }

  const Rng root(o.seed);
  std::vector<std::size_t> order(o.count);
  std::iota(order.begin(), order.end(), 0);
  Rng label_rng = root.child(0);
  label_rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> labels(o.count, 0);
  for (std::size_t i = 0; i < positives; ++i) labels[order[i]] = 1;

  const double size = static_cast<double>(o.size);
  const double margin = size / 8.0;
  std::vector<SynthSample> out;
  out.reserve(o.count);
  for (std::size_t i = 0; i < o.count; ++i) {
    Rng rng = root.child(1 + i);
    MultiBandImage img(o.size, o.size, o.bands, 0.0);
    // Brightness offset shared by all live bands, like a scene-level
    // illumination change.
    const double offset = 0.3 * rng.normal();
    for (std::size_t b = 0; b < o.bands; ++b) {
      if (o.dead_band && b == *o.dead_band) continue;
      for (std::size_t y = 0; y < o.size; ++y) {
        for (std::size_t x = 0; x < o.size; ++x) img.at(y, x, b) = offset + o.noise * rng.normal();
      }
    }
    auto bump = [&](std::span<const std::size_t> bands) {
      const double cy = rng.uniform(margin, size - margin);
      const double cx = rng.uniform(margin, size - margin);
      const double sigma = rng.uniform(size / 8.0, size / 4.0);
      for (std::size_t b : bands) add_bump(img, b, cy, cx, sigma, o.amplitude * rng.uniform(0.7, 1.3));
    };
    if (!distractors.empty()) {
      for (int d = 0; d < 2; ++d) {
        const std::size_t band = distractors[static_cast<std::size_t>(rng.below(distractors.size()))];
        bump(std::span(&band, 1));
      }
    }
    if (labels[i] == 1) bump(o.signal_bands);
    // Stored as 32-bit floats; round now so memory and disk agree.
    for (auto& v : img.data()) v = static_cast<double>(static_cast<float>(v));
    char id[32];
    std::snprintf(id, sizeof id, "img%05zu", i);
    out.push_back({id, std::move(img), labels[i]});
  }
  return out;
}

}  // namespace landslide
