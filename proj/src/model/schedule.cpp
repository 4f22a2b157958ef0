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
#include <sstream>

#include "landslide/error.hpp"
#include "landslide/model.hpp"

namespace landslide::model {

BackboneConfig BackboneConfig::efficientnet_v2_large(int input_channels, int input_size) {
  using Op = StageOperator;
  BackboneConfig cfg;
  cfg.input_channels = input_channels;
  cfg.input_size = input_size;
  cfg.stages = {
      {Op::kConv, 3, std::nullopt, 2, 32, 1},
      {Op::kFusedMbconv, 3, 1, 1, 32, 4},
      {Op::kFusedMbconv, 3, 4, 2, 64, 7},
      {Op::kFusedMbconv, 3, 4, 2, 96, 7},
      {Op::kMbconvSe, 3, 4, 2, 192, 10},
      {Op::kMbconvSe, 3, 6, 1, 224, 19},
      {Op::kMbconvSe, 3, 6, 2, 384, 25},
      {Op::kMbconvSe, 3, 6, 1, 640, 7},
      // 1x1 conv, average pool and FC; no spatial stride.
      {Op::kHead, 1, std::nullopt, 1, 1280, 1},
  };
  return cfg;
}

void BackboneConfig::validate() const {
  if (input_channels <= 0 || input_size <= 0) throw ArgumentError("backbone: input channels and size must be positive");
  if (stages.empty()) throw ArgumentError("backbone: no stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    std::ostringstream where;
    where << "backbone stage " << i << ": ";
    if (s.stride != 1 && s.stride != 2) throw ArgumentError(where.str() + "stride must be 1 or 2");
    if (s.kernel <= 0 || s.out_channels <= 0 || s.num_layers <= 0) {
      throw ArgumentError(where.str() + "kernel, channels and layers must be positive");
    }
    if (s.expand && *s.expand <= 0) throw ArgumentError(where.str() + "expand ratio must be positive");
  }
}

std::vector<StageShape> stage_shapes(const BackboneConfig& cfg) {
  cfg.validate();
  std::vector<StageShape> out;
  out.reserve(cfg.stages.size());
  int h = cfg.input_size;
  int w = cfg.input_size;
  int down = 1;
  for (std::size_t i = 0; i < cfg.stages.size(); ++i) {
    const auto& s = cfg.stages[i];
    if (s.stride == 2) {
      h = (h + 1) / 2;
      w = (w + 1) / 2;
      down *= 2;
    }
    out.push_back({i, h, w, s.out_channels, down});
  }
  return out;
}

}  // namespace landslide::model
