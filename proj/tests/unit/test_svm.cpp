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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

#include "landslide/error.hpp"
#include "landslide/svm.hpp"
#include "oracles/svm_dual_oracle.hpp"

using namespace landslide;
using namespace landslide::svm;

namespace {

struct Instance {
  FeatureRows x;
  std::vector<int> y;
};

Instance random_instance(Rng& rng, std::size_t n, std::size_t d) {
  Instance inst;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    std::vector<double> row(d);
    for (auto& v : row) v = rng.normal() + 0.7 * label;
    inst.x.push_back(row);
    inst.y.push_back(label);
  }
  return inst;
}

FeatureRows probe_grid(std::size_t d, double lo, double hi, int steps) {
  FeatureRows out;
  std::vector<double> p(d, lo);
  for (int i = 0; i < steps; ++i) {
    for (std::size_t k = 0; k < d; ++k) p[k] = lo + (hi - lo) * ((i + static_cast<int>(k) * 3) % steps) / (steps - 1);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("rbf kernel values") {
  const std::vector<double> x{0.3, -1.0}, z{1.3, -1.0};
  CHECK(rbf_kernel(x, x, 5.0) == 1.0);
  CHECK(rbf_kernel(x, z, 1.0) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
  const std::vector<double> short_vec{1.0};
  CHECK_THROWS_AS(rbf_kernel(x, short_vec, 1.0), DimensionError);
}

TEST_CASE("kernel matrices are symmetric positive semi-definite") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto inst = random_instance(rng, 10, 3);
    const double gamma = 0.1 + 2.0 * rng.uniform();
    const auto k = kernel_matrix(inst.x, gamma);
    Eigen::MatrixXd m(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        m(i, j) = k[static_cast<std::size_t>(i * 10 + j)];
        CHECK(m(i, j) == k[static_cast<std::size_t>(j * 10 + i)]);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("smo matches the projected-gradient oracle") {
  Rng rng(2);
  const double cs[3] = {0.1, 1.0, 10.0};
  for (int t = 0; t < 12; ++t) {
    const std::size_t n = 6 + static_cast<std::size_t>(rng.below(15));
    const std::size_t d = 1 + static_cast<std::size_t>(rng.below(4));
    const auto inst = random_instance(rng, n, d);
    SvmConfig cfg;
    cfg.c = cs[t % 3];
    cfg.gamma = 0.5;
    const auto k = kernel_matrix(inst.x, *cfg.gamma);
    const auto ref = oracle::solve_dual_projected_gradient(k, inst.y, cfg.c);
    const auto smo = solve_smo(k, inst.y, cfg.c, cfg.tolerance, cfg.max_passes, cfg.max_sweeps, rng);
    const double obj = dual_objective(smo.alpha, inst.y, k);
    INFO("n=", n, " d=", d, " C=", cfg.c, " smo=", obj, " oracle=", ref.objective);
    CHECK(smo.converged);
    CHECK(std::abs(obj - ref.objective) / std::abs(ref.objective) <= 1e-3);
    double eq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(smo.alpha[i] >= 0.0);
      CHECK(smo.alpha[i] <= cfg.c);
      eq += smo.alpha[i] * inst.y[i];
    }
    CHECK(std::abs(eq) <= 1e-6 * cfg.c * static_cast<double>(n));
    CHECK(max_kkt_violation(smo.alpha, smo.bias, inst.y, k, cfg.c) <= cfg.tolerance);
  }
}

TEST_CASE("two symmetric points") {
  const FeatureRows x{{-1.0}, {1.0}};
  const std::vector<int> y{-1, 1};
  SvmConfig cfg;
  cfg.c = 100.0;
  cfg.gamma = 2.0;
  Rng rng(3);
  const auto m = fit_smo(x, y, cfg, rng);
  const std::vector<double> mid{0.0};
  CHECK(std::abs(decision(m, mid)) <= 1e-6);
  for (double v : {-3.0, -0.5, -0.01, 0.01, 0.5, 3.0}) {
    const std::vector<double> p{v};
    CHECK(predict_sign(m, p) == (v > 0 ? 1 : -1));
  }
}

TEST_CASE("xor is separated by the rbf kernel") {
  const FeatureRows x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> y{-1, -1, 1, 1};
  SvmConfig cfg;
  cfg.c = 10.0;
  cfg.gamma = 1.0;
  Rng rng(4);
  const auto m = fit_smo(x, y, cfg, rng);
  for (std::size_t i = 0; i < 4; ++i) CHECK(predict_sign(m, x[i]) == y[i]);
  const auto k = kernel_matrix(x, 1.0);
  const auto ref = oracle::solve_dual_projected_gradient(k, y, 10.0);
  std::vector<double> alpha(4, 0.0);
  for (std::size_t s = 0; s < m.support_vectors.size(); ++s)
    for (std::size_t i = 0; i < 4; ++i)
      if (m.support_vectors[s] == x[i]) alpha[i] = m.dual_coefs[s] * y[i];
  CHECK(std::abs(dual_objective(alpha, y, k) - ref.objective) / ref.objective <= 1e-3);
}

TEST_CASE("free support vectors sit on the margin") {
  Rng rng(5);
  const auto inst = random_instance(rng, 20, 2);
  SvmConfig cfg;
  cfg.c = 1.0;
  cfg.gamma = 0.5;
  const auto m = fit_smo(inst.x, inst.y, cfg, rng);
  for (std::size_t s = 0; s < m.support_vectors.size(); ++s) {
    const double a = std::abs(m.dual_coefs[s]);
    if (a <= 1e-6 || a >= cfg.c - 1e-6) continue;
    const int ys = m.dual_coefs[s] > 0 ? 1 : -1;
    CHECK(std::abs(ys * decision(m, m.support_vectors[s]) - 1.0) <= 1e-2);
  }
}

TEST_CASE("duplicated data gives the same decision function") {
  Rng rng(6);
  FeatureRows x;
  std::vector<int> y;
  for (int i = 0; i < 8; ++i) {
    const int label = i % 2 ? 1 : -1;
    x.push_back({rng.normal() + 2.0 * label, rng.normal()});
    y.push_back(label);
  }
  auto x2 = x;
  auto y2 = y;
  x2.insert(x2.end(), x.begin(), x.end());
  y2.insert(y2.end(), y.begin(), y.end());
  SvmConfig cfg;
  cfg.c = 1000.0;  // separable, so the box never binds and the solutions coincide
  cfg.gamma = 0.5;
  cfg.tolerance = 1e-9;
  Rng r1(7), r2(7);
  const auto a = fit_smo(x, y, cfg, r1);
  const auto b = fit_smo(x2, y2, cfg, r2);
  for (const auto& p : probe_grid(2, -3.0, 3.0, 25)) CHECK(std::abs(decision(a, p) - decision(b, p)) <= 1e-6);
}

TEST_CASE("joint rescaling of inputs and gamma leaves decisions unchanged") {
  Rng rng(8);
  const auto inst = random_instance(rng, 16, 3);
  const double s = 4.0;
  FeatureRows scaled = inst.x;
  for (auto& row : scaled)
    for (auto& v : row) v *= s;
  SvmConfig cfg;
  cfg.c = 1.0;
  cfg.gamma = 0.4;
  auto cfg_scaled = cfg;
  cfg_scaled.gamma = 0.4 / (s * s);
  Rng r1(9), r2(9);
  const auto a = fit_smo(inst.x, inst.y, cfg, r1);
  const auto b = fit_smo(scaled, inst.y, cfg_scaled, r2);
  for (auto p : probe_grid(3, -2.0, 2.0, 15)) {
    const double fa = decision(a, p);
    for (auto& v : p) v *= s;
    CHECK(std::abs(fa - decision(b, p)) <= 1e-6);
  }
}

TEST_CASE("fit_head on separated embeddings, invariant to row order") {
  Rng rng(10);
  FeatureRows emb;
  std::vector<int> labels;
  for (int i = 0; i < 30; ++i) {
    const int label = i % 3 == 0 ? 1 : 0;
    std::vector<double> row(5);
    for (auto& v : row) v = 10.0 + 0.2 * rng.normal();
    row[2] += label ? 3.0 : -3.0;
    emb.push_back(row);
    labels.push_back(label);
  }
  SvmConfig cfg;
  cfg.c = 1.0;
  cfg.tolerance = 1e-8;
  Rng r1(11);
  const auto m = fit_head(emb, labels, cfg, r1);
  REQUIRE(m.normalization.has_value());
  for (std::size_t i = 0; i < emb.size(); ++i) CHECK((predict_sign(m, emb[i]) == 1) == (labels[i] == 1));

  std::vector<std::size_t> perm(emb.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng shuffle_rng(12);
  shuffle_rng.shuffle(std::span<std::size_t>(perm));
  FeatureRows emb2;
  std::vector<int> labels2;
  for (auto p : perm) {
    emb2.push_back(emb[p]);
    labels2.push_back(labels[p]);
  }
  Rng r2(13);
  const auto m2 = fit_head(emb2, labels2, cfg, r2);
  for (const auto& row : emb) CHECK(std::abs(decision(m, row) - decision(m2, row)) <= 1e-6);
}

TEST_CASE("degenerate and invalid inputs") {
  const FeatureRows x{{0.0}, {1.0}, {2.0}};
  const std::vector<int> same{1, 1, 1};
  Rng rng(14);
  CHECK_THROWS_AS(fit_smo(x, same, SvmConfig{}, rng), DegenerateDataError);
  const std::vector<int> zeros{0, 0, 0};
  CHECK_THROWS_AS(fit_head(x, zeros, SvmConfig{}, rng), DegenerateDataError);
  SvmConfig bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(bad.validate(), ArgumentError);
  const std::vector<int> y{1, -1, 1};
  const auto m = fit_smo(x, y, SvmConfig{}, rng);
  const std::vector<double> wrong{1.0, 2.0};
  CHECK_THROWS_AS(decision(m, wrong), DimensionError);
}

TEST_CASE("auto gamma") {
  const FeatureRows x{{0.0, 0.0}, {2.0, 2.0}};
  CHECK(auto_gamma(x) == doctest::Approx(1.0 / (2.0 * 1.0)));
}

TEST_CASE("model file round trip reproduces decisions exactly") {
  Rng rng(15);
  FeatureRows emb;
  std::vector<int> labels;
  for (int i = 0; i < 12; ++i) {
    emb.push_back({rng.normal() + (i % 2), rng.normal()});
    labels.push_back(i % 2);
  }
  SvmConfig cfg;
  cfg.c = 0.1;
  const auto m = fit_head(emb, labels, cfg, rng);
  const auto bytes = encode_model(m);
  CHECK(std::equal(bytes.begin(), bytes.begin() + 4, "SVM1"));
  const auto back = decode_model(bytes);
  CHECK(back.c == 0.1);
  for (const auto& row : emb) CHECK(decision(back, row) == decision(m, row));
  CHECK(encode_model(back) == bytes);
  auto bad = bytes;
  bad.resize(bad.size() - 1);
  CHECK_THROWS_AS(decode_model(bad), FormatError);

  const auto path = std::filesystem::temp_directory_path() / "landslide_svm_test.svm";
  save_model(path, m);
  CHECK(encode_model(load_model(path)) == bytes);
  std::filesystem::remove(path);
}
