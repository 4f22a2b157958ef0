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

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace landslide {

/// H x W x C raster stored channel-last, row-major: index (y * W + x) * C + b.
class MultiBandImage {
 public:
  MultiBandImage() = default;
  MultiBandImage(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  /// Throws DimensionError when data.size() != h*w*c and ArgumentError on
  /// zero extents or non-finite values.
  MultiBandImage(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixels() const noexcept { return height_ * width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  double at(std::size_t y, std::size_t x, std::size_t b) const noexcept {
    return data_[(y * width_ + x) * channels_ + b];
  }
  double& at(std::size_t y, std::size_t x, std::size_t b) noexcept {
    return data_[(y * width_ + x) * channels_ + b];
  }

  bool same_shape(const MultiBandImage& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  std::string shape_string() const;

  bool operator==(const MultiBandImage&) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

void require_same_shape(const MultiBandImage& a, const MultiBandImage& b, const char* what);

/// Probability vector over {non-landslide, landslide}.
class SoftLabel {
 public:
  SoftLabel() = default;
  /// Throws ArgumentError unless both entries lie in [0,1] and sum to 1 within 1e-9.
  SoftLabel(double non_landslide, double landslide);

  static SoftLabel hard(int label);
  /// Convex combination weight * a + (1 - weight) * b.
  static SoftLabel mix(const SoftLabel& a, const SoftLabel& b, double weight);

  double operator[](std::size_t i) const noexcept { return p_[i]; }
  const std::array<double, 2>& probs() const noexcept { return p_; }
  double landslide() const noexcept { return p_[1]; }
  // Hard class; ties at 0.5 go to landslide.
  int argmax() const noexcept { return p_[1] >= p_[0] ? 1 : 0; }

  bool operator==(const SoftLabel&) const = default;

 private:
  std::array<double, 2> p_{1.0, 0.0};
};

bool is_valid_soft_label(double p0, double p1, double tol = 1e-9) noexcept;

}  // namespace landslide
