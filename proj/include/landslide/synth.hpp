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
#include <optional>
#include <string>
#include <vector>

#include "landslide/image.hpp"

namespace landslide {

// Two-class multi-band benchmark. Landslide images carry a Gaussian bump in
// every signal band; both classes get bumps of similar size in other bands
// as distractors. The dead band is identically zero.
struct SynthOptions {
  std::size_t count = 400;
  std::size_t size = 64;
  std::size_t bands = 12;
  double imbalance = 8.0;  // negatives per positive
  std::vector<std::size_t> signal_bands{1, 4, 7};
  std::optional<std::size_t> dead_band = 10;
  double amplitude = 2.5;
  double noise = 0.5;
  std::uint64_t seed = 42;

  void validate() const;
};

struct SynthSample {
  std::string id;
  MultiBandImage image;
  int label = 0;
};

std::vector<SynthSample> make_synth(const SynthOptions& options);

}  // namespace landslide
