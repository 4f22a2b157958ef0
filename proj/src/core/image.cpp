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
#include "landslide/image.hpp"

#include <cmath>
#include <sstream>

#include "landslide/error.hpp"

namespace landslide {

MultiBandImage::MultiBandImage(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {
  if (height == 0 || width == 0 || channels == 0) throw ArgumentError("image extents must be positive");
}

MultiBandImage::MultiBandImage(std::size_t height, std::size_t width, std::size_t channels,
                               std::vector<double> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
  if (height == 0 || width == 0 || channels == 0) throw ArgumentError("image extents must be positive");
  if (data_.size() != height * width * channels) {
    std::ostringstream os;
    os << "image data length " << data_.size() << " does not match " << shape_string();
    throw DimensionError(os.str());
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw ArgumentError("image data contains a non-finite value");
  }
}

std::string MultiBandImage::shape_string() const {
  std::ostringstream os;
  os << height_ << "x" << width_ << "x" << channels_;
  return os.str();
}

void require_same_shape(const MultiBandImage& a, const MultiBandImage& b, const char* what) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " + b.shape_string());
  }
}

bool is_valid_soft_label(double p0, double p1, double tol) noexcept {
  return std::isfinite(p0) && std::isfinite(p1) && p0 >= 0.0 && p0 <= 1.0 && p1 >= 0.0 && p1 <= 1.0 &&
         std::abs(p0 + p1 - 1.0) <= tol;
}

SoftLabel::SoftLabel(double non_landslide, double landslide) : p_{non_landslide, landslide} {
  if (!is_valid_soft_label(non_landslide, landslide)) {
    std::ostringstream os;
    os << "invalid soft label (" << non_landslide << ", " << landslide << ")";
    throw ArgumentError(os.str());
  }
}

SoftLabel SoftLabel::hard(int label) {
  if (label != 0 && label != 1) throw ArgumentError("hard label must be 0 or 1");
  return label == 1 ? SoftLabel(0.0, 1.0) : SoftLabel(1.0, 0.0);
}

SoftLabel SoftLabel::mix(const SoftLabel& a, const SoftLabel& b, double weight) {
  SoftLabel out;
  out.p_[0] = weight * a.p_[0] + (1.0 - weight) * b.p_[0];
  out.p_[1] = weight * a.p_[1] + (1.0 - weight) * b.p_[1];
  return out;
}

}  // namespace landslide
