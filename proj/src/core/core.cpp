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
#include "landslide/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "landslide/error.hpp"

namespace landslide {

namespace {

struct BandRange {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

BandRange band_range(const MultiBandImage& img, std::size_t band, BandRange r = {}) {
  const auto d = img.data();
  const std::size_t c = img.channels();
  for (std::size_t i = band; i < d.size(); i += c) {
    r.lo = std::min(r.lo, d[i]);
    r.hi = std::max(r.hi, d[i]);
  }
  return r;
}

}  // namespace

double ssim_band(const MultiBandImage& a, const MultiBandImage& b, std::size_t band) {
  require_same_shape(a, b, "ssim");
  if (band >= a.channels()) throw ArgumentError("ssim: band index out of range");

  const BandRange r = band_range(b, band, band_range(a, band));
  const double range = std::max(r.hi - r.lo, kSsimMinRange);
  const double c1 = (kSsimK1 * range) * (kSsimK1 * range);
  const double c2 = (kSsimK2 * range) * (kSsimK2 * range);

  const std::size_t h = a.height();
  const std::size_t w = a.width();
  double total = 0.0;
  std::size_t windows = 0;
  for (std::size_t y0 = 0; y0 < h; y0 += kSsimWindow) {
    const std::size_t y1 = std::min(h, y0 + kSsimWindow);
    for (std::size_t x0 = 0; x0 < w; x0 += kSsimWindow) {
      const std::size_t x1 = std::min(w, x0 + kSsimWindow);
      const double n = static_cast<double>((y1 - y0) * (x1 - x0));

      double sa = 0.0, sb = 0.0;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) {
          sa += a.at(y, x, band);
          sb += b.at(y, x, band);
        }
      }
      const double mu_a = sa / n;
      const double mu_b = sb / n;

      double vaa = 0.0, vbb = 0.0, vab = 0.0;
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) {
          const double da = a.at(y, x, band) - mu_a;
          const double db = b.at(y, x, band) - mu_b;
          vaa += da * da;
          vbb += db * db;
          vab += da * db;
        }
      }
      vaa /= n;
      vbb /= n;
      vab /= n;

      const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * vab + c2);
      const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (vaa + vbb + c2);
      total += num / den;
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double ssim(const MultiBandImage& a, const MultiBandImage& b) {
  require_same_shape(a, b, "ssim");
  if (a.empty()) throw ArgumentError("ssim: empty image");
  double sum = 0.0;
  for (std::size_t band = 0; band < a.channels(); ++band) sum += ssim_band(a, b, band);
  return sum / static_cast<double>(a.channels());
}

std::string to_string(NormalizationMode mode) {
  return mode == NormalizationMode::kRobust ? "robust" : "standard";
}

NormalizationMode normalization_mode_from_string(const std::string& s) {
  if (s == "standard") return NormalizationMode::kStandard;
  if (s == "robust") return NormalizationMode::kRobust;
  throw ConfigError("unknown normalization mode '" + s + "' (expected standard or robust)");
}

double quantile_type7(std::vector<double> values, double q) {
  if (values.empty()) throw EmptyDatasetError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

// Statistics of one column of values; a constant column is centred exactly.
void column_stats(std::vector<double>& values, NormalizationMode mode, double& center, double& scale) {
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    center = *mn;
    scale = 1.0;
    return;
  }
  if (mode == NormalizationMode::kStandard) {
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    center = mean;
    scale = std::sqrt(ss / static_cast<double>(values.size()));
  } else {
    center = quantile_type7(values, 0.5);
    scale = quantile_type7(values, 0.75) - quantile_type7(values, 0.25);
  }
  if (!(scale > 0.0)) scale = 1.0;
}

}  // namespace

NormalizationStats fit_normalization(std::span<const MultiBandImage> images, NormalizationMode mode) {
  if (images.empty()) throw EmptyDatasetError("fit_normalization: no images");
  for (const auto& img : images) require_same_shape(images.front(), img, "fit_normalization");

  const std::size_t bands = images.front().channels();
  NormalizationStats stats;
  stats.mode = mode;
  stats.center.resize(bands);
  stats.scale.resize(bands);
  std::vector<double> values;
  values.reserve(images.size() * images.front().pixels());
  for (std::size_t b = 0; b < bands; ++b) {
    values.clear();
    for (const auto& img : images) {
      const auto d = img.data();
      for (std::size_t i = b; i < d.size(); i += bands) values.push_back(d[i]);
    }
    column_stats(values, mode, stats.center[b], stats.scale[b]);
  }
  return stats;
}

NormalizationStats fit_feature_normalization(std::span<const std::vector<double>> rows, NormalizationMode mode) {
  if (rows.empty()) throw EmptyDatasetError("fit_feature_normalization: no rows");
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw DimensionError("fit_feature_normalization: ragged feature rows");
  }
  NormalizationStats stats;
  stats.mode = mode;
  stats.center.resize(dim);
  stats.scale.resize(dim);
  std::vector<double> values(rows.size());
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) values[i] = rows[i][j];
    column_stats(values, mode, stats.center[j], stats.scale[j]);
  }
  return stats;
}

MultiBandImage apply_normalization(const MultiBandImage& img, const NormalizationStats& stats) {
  if (img.channels() != stats.bands()) throw DimensionError("apply_normalization: band count mismatch");
  MultiBandImage out = img;
  auto d = out.data();
  const std::size_t c = img.channels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (d[i] - stats.center[i % c]) / stats.scale[i % c];
  return out;
}

MultiBandImage invert_normalization(const MultiBandImage& img, const NormalizationStats& stats) {
  if (img.channels() != stats.bands()) throw DimensionError("invert_normalization: band count mismatch");
  MultiBandImage out = img;
  auto d = out.data();
  const std::size_t c = img.channels();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = d[i] * stats.scale[i % c] + stats.center[i % c];
  return out;
}

std::vector<double> apply_normalization(std::span<const double> row, const NormalizationStats& stats) {
  if (row.size() != stats.bands()) throw DimensionError("apply_normalization: feature count mismatch");
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - stats.center[j]) / stats.scale[j];
  return out;
}

MultiBandImage resize_bilinear(const MultiBandImage& img, std::size_t out_h, std::size_t out_w) {
  if (out_h == 0 || out_w == 0) throw ArgumentError("resize_bilinear: target size must be positive");
  if (img.empty()) throw ArgumentError("resize_bilinear: empty image");
  if (out_h == img.height() && out_w == img.width()) return img;

  struct Tap {
    std::size_t i0, i1;
    double f;
  };
  auto taps = [](std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double ratio = static_cast<double>(in) / static_cast<double>(out);
    const double max_src = static_cast<double>(in - 1);
    for (std::size_t o = 0; o < out; ++o) {
      const double src = std::clamp((static_cast<double>(o) + 0.5) * ratio - 0.5, 0.0, max_src);
      const auto i0 = static_cast<std::size_t>(std::floor(src));
      t[o] = {i0, std::min(i0 + 1, in - 1), src - static_cast<double>(i0)};
    }
    return t;
  };
  const auto ty = taps(img.height(), out_h);
  const auto tx = taps(img.width(), out_w);

  MultiBandImage out(out_h, out_w, img.channels());
  for (std::size_t y = 0; y < out_h; ++y) {
    for (std::size_t x = 0; x < out_w; ++x) {
      for (std::size_t b = 0; b < img.channels(); ++b) {
        // a + f * (b - a) form keeps constant regions exact.
        const double v00 = img.at(ty[y].i0, tx[x].i0, b);
        const double v01 = img.at(ty[y].i0, tx[x].i1, b);
        const double v10 = img.at(ty[y].i1, tx[x].i0, b);
        const double v11 = img.at(ty[y].i1, tx[x].i1, b);
        const double top = v00 + tx[x].f * (v01 - v00);
        const double bottom = v10 + tx[x].f * (v11 - v10);
        out.at(y, x, b) = top + ty[y].f * (bottom - top);
      }
    }
  }
  return out;
}

MultiBandImage select_bands(const MultiBandImage& img, std::span<const std::size_t> bands) {
  if (bands.empty()) return img;
  for (std::size_t b : bands) {
    if (b >= img.channels()) throw ArgumentError("select_bands: band index out of range for " + img.shape_string());
  }
  MultiBandImage out(img.height(), img.width(), bands.size());
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    for (std::size_t k = 0; k < bands.size(); ++k) {
      out.data()[p * bands.size() + k] = img.data()[p * img.channels() + bands[k]];
    }
  }
  return out;
}

}  // namespace landslide
