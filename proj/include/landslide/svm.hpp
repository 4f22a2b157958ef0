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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "landslide/core.hpp"
#include "landslide/rng.hpp"

namespace landslide::svm {

using FeatureRows = std::vector<std::vector<double>>;

struct SvmConfig {
  double c = 1.0;
  std::optional<double> gamma;  // nullopt = auto: 1 / (D * var(features))
  double tolerance = 1e-3;
  int max_passes = 10;
  std::size_t max_sweeps = 100000;

  void validate() const;
};

// Decision function f(x) = sum_i dual_coefs[i] * k(sv_i, x) + bias, with
// y = +1 for landslide. When `normalization` is set, x is standardised with
// it before the kernel is evaluated.
struct SvmModel {
  FeatureRows support_vectors;
  std::vector<double> dual_coefs;  // alpha_i * y_i
  double bias = 0.0;
  double gamma = 1.0;
  double c = 1.0;
  double tolerance = 1e-3;
  std::optional<NormalizationStats> normalization;

  std::size_t dim() const noexcept { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

double rbf_kernel(std::span<const double> x, std::span<const double> z, double gamma);

double auto_gamma(const FeatureRows& x);

std::vector<double> kernel_matrix(const FeatureRows& x, double gamma);

// Dual objective sum(alpha) - 1/2 alpha' Q alpha, Q_ij = y_i y_j K_ij.
double dual_objective(std::span<const double> alpha, std::span<const int> y, std::span<const double> kernel);

struct SmoResult {
  std::vector<double> alpha;
  double bias = 0.0;
  std::size_t sweeps = 0;
  bool converged = false;  // no KKT violator beyond tolerance in the last sweep
};

// Simplified SMO over a precomputed N x N kernel matrix. For each KKT
// violator the second index is drawn at random; if that pair cannot move, the
// remaining indices are scanned from a random offset.
SmoResult solve_smo(std::span<const double> kernel, std::span<const int> y, double c, double tolerance,
                    int max_passes, std::size_t max_sweeps, Rng& rng);

// Largest KKT violation of (alpha, bias) measured on y_i * f(x_i).
double max_kkt_violation(std::span<const double> alpha, double bias, std::span<const int> y,
                         std::span<const double> kernel, double c);

// y must hold -1/+1 labels. Throws DegenerateDataError for a single class.
SvmModel fit_smo(const FeatureRows& x, std::span<const int> y, const SvmConfig& cfg, Rng& rng);

double decision(const SvmModel& model, std::span<const double> x);
// +1 (landslide) when f(x) >= 0, else -1.
int predict_sign(const SvmModel& model, std::span<const double> x);

// Standardises embeddings, then fits. Labels are dataset labels {0, 1}.
SvmModel fit_head(const FeatureRows& embeddings, std::span<const int> labels01, const SvmConfig& cfg, Rng& rng);

// ".svm": "SVM1", u32 LE header length, JSON header, then support vectors
// (M x D) and dual coefficients (M) as float32 LE.
std::vector<std::uint8_t> encode_model(const SvmModel& model);
SvmModel decode_model(std::span<const std::uint8_t> bytes);
void save_model(const std::filesystem::path& path, const SvmModel& model);
SvmModel load_model(const std::filesystem::path& path);

}  // namespace landslide::svm
