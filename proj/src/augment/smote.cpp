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
#include <numeric>
#include <sstream>

#include "landslide/augment.hpp"
#include "landslide/core.hpp"
#include "landslide/error.hpp"

namespace landslide::augment {

void SmoteConfig::validate() const {
  if (k_neighbors == 0) throw ArgumentError("smote: k_neighbors must be positive");
  if (n_syn == 0) throw ArgumentError("smote: n_syn must be positive");
  if (!(clip_lo >= 0.0 && clip_lo < clip_hi && clip_hi <= 1.0)) {
    throw ArgumentError("smote: clip bounds must satisfy 0 <= clip_lo < clip_hi <= 1");
  }
  if (!(beta_alpha > 0.0) || !(beta_beta > 0.0)) throw ArgumentError("smote: Beta parameters must be positive");
  if (max_candidates != 0 && max_candidates < k_neighbors) {
    throw ArgumentError("smote: max_candidates must be 0 or at least k_neighbors");
  }
  if (fixed_lambda && !(*fixed_lambda >= 0.0 && *fixed_lambda <= 1.0)) {
    throw ArgumentError("smote: fixed_lambda must lie in [0, 1]");
  }
}

double clip_lambda(double lambda, double lo, double hi) noexcept { return std::clamp(lambda, lo, hi); }

std::vector<std::size_t> ssim_neighbors(std::span<const MultiBandImage> images, std::size_t anchor, std::size_t k,
                                        std::span<const std::size_t> candidates) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t c : candidates) {
    if (c == anchor) continue;
    scored.emplace_back(ssim(images[anchor], images[c]), c);
  }
  if (scored.size() < k) throw InsufficientDataError("smote: fewer candidates than k_neighbors");
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const auto& l, const auto& r) { return l.first > r.first || (l.first == r.first && l.second < r.second); });
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

MultiBandImage interpolate(const MultiBandImage& anchor, const MultiBandImage& neighbor, double lambda) {
  require_same_shape(anchor, neighbor, "interpolate");
  MultiBandImage out = anchor;
  auto o = out.data();
  const auto n = neighbor.data();
  const double mu = 1.0 - lambda;
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double a = o[i];
    const double b = n[i];
    o[i] = std::clamp(lambda * a + mu * b, std::min(a, b), std::max(a, b));
  }
  return out;
}

std::vector<SyntheticImage> smote_ssim(std::span<const MultiBandImage> minority, const SmoteConfig& cfg, Rng& rng) {
  cfg.validate();
  const std::size_t n = minority.size();
  if (n <= cfg.k_neighbors) {
    std::ostringstream os;
    os << "smote: minority set has " << n << " images, need more than k_neighbors=" << cfg.k_neighbors;
    throw InsufficientDataError(os.str());
  }
  for (const auto& img : minority) require_same_shape(minority.front(), img, "smote");

  const bool capped = cfg.max_candidates != 0 && cfg.max_candidates < n - 1;

  // Full pairwise similarity is symmetric, so compute each pair once.
  std::vector<double> sim;
  if (!capped) {
    sim.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) sim[i * n + j] = sim[j * n + i] = ssim(minority[i], minority[j]);
    }
  }

  std::vector<SyntheticImage> out;
  out.reserve(n * cfg.n_syn);
  std::vector<std::size_t> pool(n);
  for (std::size_t anchor = 0; anchor < n; ++anchor) {
    std::vector<std::size_t> neighbors;
    if (capped) {
      std::iota(pool.begin(), pool.end(), 0);
      std::swap(pool[anchor], pool.back());
      std::span<std::size_t> others(pool.data(), n - 1);
      // Partial Fisher-Yates for the first max_candidates slots.
      for (std::size_t i = 0; i < cfg.max_candidates; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(others.size() - i));
        std::swap(others[i], others[j]);
      }
      neighbors = ssim_neighbors(minority, anchor, cfg.k_neighbors, others.first(cfg.max_candidates));
    } else {
      std::vector<std::pair<double, std::size_t>> scored;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != anchor) scored.emplace_back(sim[anchor * n + j], j);
      }
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(cfg.k_neighbors), scored.end(),
                        [](const auto& l, const auto& r) {
                          return l.first > r.first || (l.first == r.first && l.second < r.second);
                        });
      for (std::size_t i = 0; i < cfg.k_neighbors; ++i) neighbors.push_back(scored[i].second);
    }

    for (std::size_t s = 0; s < cfg.n_syn; ++s) {
      const std::size_t nb = neighbors[static_cast<std::size_t>(rng.below(neighbors.size()))];
      const double raw = cfg.fixed_lambda ? *cfg.fixed_lambda : rng.beta(cfg.beta_alpha, cfg.beta_beta);
      const double lambda = clip_lambda(raw, cfg.clip_lo, cfg.clip_hi);
      out.push_back({interpolate(minority[anchor], minority[nb], lambda), anchor, nb, lambda, raw});
    }
  }
  return out;
}

}  // namespace landslide::augment
