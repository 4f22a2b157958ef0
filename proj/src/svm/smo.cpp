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
#include <limits>
#include <sstream>

#include "landslide/error.hpp"
#include "landslide/svm.hpp"

namespace landslide::svm {

void SvmConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("svm: C must be positive");
  if (gamma && !(*gamma > 0.0)) throw ArgumentError("svm: gamma must be positive");
  if (!(tolerance > 0.0)) throw ArgumentError("svm: tolerance must be positive");
  if (max_passes <= 0) throw ArgumentError("svm: max_passes must be positive");
  if (max_sweeps == 0) throw ArgumentError("svm: max_sweeps must be positive");
}

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma) {
  if (x.size() != z.size()) throw DimensionError("rbf_kernel: dimension mismatch");
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - z[i];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double auto_gamma(const FeatureRows& x) {
  if (x.empty() || x.front().empty()) throw EmptyDatasetError("svm: no features for gamma");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : x) {
    for (double v : r) sum += v;
    n += r.size();
  }
  const double mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (const auto& r : x) {
    for (double v : r) ss += (v - mean) * (v - mean);
  }
  const double var = ss / static_cast<double>(n);
  const double dim = static_cast<double>(x.front().size());
  return var > 0.0 ? 1.0 / (dim * var) : 1.0 / dim;
}

std::vector<double> kernel_matrix(const FeatureRows& x, double gamma) {
  const std::size_t n = x.size();
  std::vector<double> k(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) k[i * n + j] = k[j * n + i] = rbf_kernel(x[i], x[j], gamma);
  }
  return k;
}

double dual_objective(std::span<const double> alpha, std::span<const int> y, std::span<const double> kernel) {
  const std::size_t n = alpha.size();
  double lin = 0.0;
  double quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) quad += alpha[i] * alpha[j] * y[i] * y[j] * kernel[i * n + j];
  }
  return lin - 0.5 * quad;
}

namespace {

// Relative progress below which a pair update is treated as no move.
constexpr double kMinStep = 1e-6;

// Puts values within rounding distance of a box bound exactly on it, so
// bound multipliers are never mistaken for free ones.
double snap(double alpha, double c) {
  const double eps = 1e-12 * c;
  if (alpha < eps) return 0.0;
  if (alpha > c - eps) return c;
  return alpha;
}

// Violation of the KKT conditions for one index given r = y_i * E_i.
double kkt_violation(double alpha, double r, double c) {
  double v = 0.0;
  if (alpha < c) v = std::max(v, -r);
  if (alpha > 0.0) v = std::max(v, r);
  return v;
}

// Every index bounds the bias through its margin target t_i = y_i - g_i.
// Indices free to move up (y=+1, alpha<C or y=-1, alpha>0) give lower
// bounds and the rest give upper bounds. The midpoint of the tightest pair
// minimizes the largest per-index KKT violation.
double optimal_bias(std::span<const double> alpha, std::span<const int> y, std::span<const double> g, double c) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double target = y[i] - g[i];
    const bool below_c = alpha[i] < c;
    const bool above_0 = alpha[i] > 0.0;
    if (y[i] > 0 ? below_c : above_0) lo = std::max(lo, target);
    if (y[i] > 0 ? above_0 : below_c) hi = std::min(hi, target);
  }
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  return std::isfinite(lo) ? lo : (std::isfinite(hi) ? hi : 0.0);
}

}  // namespace

double max_kkt_violation(std::span<const double> alpha, double bias, std::span<const int> y,
                         std::span<const double> kernel, double c) {
  const std::size_t n = alpha.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = bias;
    for (std::size_t j = 0; j < n; ++j) f += alpha[j] * y[j] * kernel[j * n + i];
    worst = std::max(worst, kkt_violation(alpha[i], y[i] * f - 1.0, c));
  }
  return worst;
}

SmoResult solve_smo(std::span<const double> kernel, std::span<const int> y, double c, double tolerance,
                    int max_passes, std::size_t max_sweeps, Rng& rng) {
  const std::size_t n = y.size();
  if (kernel.size() != n * n) throw DimensionError("solve_smo: kernel matrix size does not match labels");
  if (n < 2) throw DegenerateDataError("solve_smo: need at least two samples");

  SmoResult r;
  r.alpha.assign(n, 0.0);
  auto& alpha = r.alpha;
  // g[k] = sum_j alpha_j y_j K_jk, so E_k = g[k] + b - y_k.
  std::vector<double> g(n, 0.0);
  auto K = [&](std::size_t i, std::size_t j) { return kernel[i * n + j]; };

  auto take_step = [&](std::size_t i, std::size_t j) {
    if (i == j) return false;
    // The bias cancels in E_i - E_j.
    const double ei = g[i] - y[i];
    const double ej = g[j] - y[j];
    const double ai = alpha[i];
    const double aj = alpha[j];
    double lo, hi;
    if (y[i] != y[j]) {
      lo = std::max(0.0, aj - ai);
      hi = std::min(c, c + aj - ai);
    } else {
      lo = std::max(0.0, ai + aj - c);
      hi = std::min(c, ai + aj);
    }
    if (lo >= hi) return false;
    const double eta = 2.0 * K(i, j) - K(i, i) - K(j, j);
    if (eta >= 0.0) return false;
    const double aj_new = snap(std::clamp(aj - y[j] * (ei - ej) / eta, lo, hi), c);
    if (std::abs(aj_new - aj) < kMinStep * (aj_new + aj + kMinStep)) return false;
    const double ai_new = snap(ai + y[i] * y[j] * (aj - aj_new), c);
    const double di = y[i] * (ai_new - ai);
    const double dj = y[j] * (aj_new - aj);

    alpha[i] = ai_new;
    alpha[j] = aj_new;
    for (std::size_t k = 0; k < n; ++k) g[k] += di * K(i, k) + dj * K(j, k);
    return true;
  };

  int passes = 0;
  while (passes < max_passes && r.sweeps < max_sweeps) {
    ++r.sweeps;
    std::size_t changed = 0;
    std::size_t violators = 0;
    double b = optimal_bias(alpha, y, g, c);
    for (std::size_t i = 0; i < n; ++i) {
      const double ri = y[i] * (g[i] + b - y[i]);
      if (kkt_violation(alpha[i], ri, c) <= tolerance) continue;
      ++violators;
      auto j = static_cast<std::size_t>(rng.below(n - 1));
      if (j >= i) ++j;
      bool moved = take_step(i, j);
      const auto start = static_cast<std::size_t>(rng.below(n));
      for (std::size_t t = 0; t < n && !moved; ++t) moved = take_step(i, (start + t) % n);
      if (moved) {
        ++changed;
        b = optimal_bias(alpha, y, g, c);
      }
    }
    if (violators == 0) {
      r.converged = true;
      break;
    }
    passes = changed == 0 ? passes + 1 : 0;
  }
  r.bias = optimal_bias(alpha, y, g, c);
  return r;
}

namespace {

void check_features(const FeatureRows& x, std::span<const int> y) {
  if (x.size() != y.size()) throw DimensionError("svm: feature rows and labels differ in length");
  if (x.size() < 2) throw DegenerateDataError("svm: need at least two samples");
  const std::size_t d = x.front().size();
  if (d == 0) throw DimensionError("svm: zero-dimensional features");
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != d) throw DimensionError("svm: ragged feature rows");
    for (double v : x[i]) {
      if (!std::isfinite(v)) throw ArgumentError("svm: non-finite feature value");
    }
    if (y[i] == 1) {
      pos = true;
    } else if (y[i] == -1) {
      neg = true;
    } else {
      throw ArgumentError("svm: labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw DegenerateDataError("svm: training data contains a single class");
}

}  // namespace

SvmModel fit_smo(const FeatureRows& x, std::span<const int> y, const SvmConfig& cfg, Rng& rng) {
  cfg.validate();
  check_features(x, y);
  const double gamma = cfg.gamma ? *cfg.gamma : auto_gamma(x);
  const auto k = kernel_matrix(x, gamma);
  const auto sol = solve_smo(k, y, cfg.c, cfg.tolerance, cfg.max_passes, cfg.max_sweeps, rng);

  SvmModel m;
  m.gamma = gamma;
  m.c = cfg.c;
  m.tolerance = cfg.tolerance;
  m.bias = sol.bias;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sol.alpha[i] <= 0.0) continue;
    // Stored at file precision so a saved model reproduces decisions exactly.
    std::vector<double> sv(x[i].size());
    for (std::size_t d = 0; d < sv.size(); ++d) sv[d] = static_cast<float>(x[i][d]);
    m.support_vectors.push_back(std::move(sv));
    m.dual_coefs.push_back(static_cast<float>(sol.alpha[i] * y[i]));
  }
  return m;
}

double decision(const SvmModel& model, std::span<const double> x) {
  if (x.size() != model.dim() && !model.support_vectors.empty()) {
    std::ostringstream os;
    os << "svm decision: input has " << x.size() << " features, model expects " << model.dim();
    throw DimensionError(os.str());
  }
  std::vector<double> z;
  if (model.normalization) {
    z = apply_normalization(x, *model.normalization);
    x = z;
  }
  double f = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
    f += model.dual_coefs[i] * rbf_kernel(model.support_vectors[i], x, model.gamma);
  }
  return f;
}

int predict_sign(const SvmModel& model, std::span<const double> x) { return decision(model, x) >= 0.0 ? 1 : -1; }

SvmModel fit_head(const FeatureRows& embeddings, std::span<const int> labels01, const SvmConfig& cfg, Rng& rng) {
  if (embeddings.size() != labels01.size()) throw DimensionError("fit_head: embeddings and labels differ in length");
  if (embeddings.empty()) throw EmptyDatasetError("fit_head: no embeddings");
  std::vector<int> y(labels01.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (labels01[i] != 0 && labels01[i] != 1) throw ArgumentError("fit_head: labels must be 0 or 1");
    y[i] = labels01[i] == 1 ? 1 : -1;
  }
  auto stats = fit_feature_normalization(embeddings, NormalizationMode::kStandard);
  FeatureRows z;
  z.reserve(embeddings.size());
  for (const auto& e : embeddings) z.push_back(apply_normalization(e, stats));
  SvmModel m = fit_smo(z, y, cfg, rng);
  m.normalization = std::move(stats);
  return m;
}

}  // namespace landslide::svm
