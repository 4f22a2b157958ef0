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
#include <numbers>

#include "landslide/error.hpp"
#include "landslide/model.hpp"

namespace landslide::model {

std::vector<double> softmax(std::span<const double> logits) {
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) z += (p[c] = std::exp(logits[c] - mx));
  for (auto& v : p) v /= z;
  return p;
}

LossResult kl_soft_loss(std::span<const std::vector<double>> logits, std::span<const SoftLabel> targets) {
  if (logits.size() != targets.size()) throw DimensionError("kl_soft_loss: logits and targets differ in length");
  if (logits.empty()) throw ArgumentError("kl_soft_loss: empty batch");
  LossResult r;
  r.dlogits.resize(logits.size());
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const auto& t = targets[i].probs();
    if (!is_valid_soft_label(t[0], t[1])) throw ArgumentError("kl_soft_loss: target row is not a probability vector");
    if (logits[i].size() != 2) throw DimensionError("kl_soft_loss: expected two logits per row");
    // log-softmax via log-sum-exp.
    const double mx = std::max(logits[i][0], logits[i][1]);
    const double lse = mx + std::log(std::exp(logits[i][0] - mx) + std::exp(logits[i][1] - mx));
    double row = 0.0;
    r.dlogits[i].resize(2);
    for (std::size_t c = 0; c < 2; ++c) {
      const double log_p = logits[i][c] - lse;
      if (t[c] > 0.0) row += t[c] * (std::log(t[c]) - log_p);
      r.dlogits[i][c] = (std::exp(log_p) - t[c]) * inv_n;
    }
    total += row;
  }
  // KL is non-negative; clamp away rounding below zero.
  r.loss = std::max(0.0, total * inv_n);
  return r;
}

AdamState AdamState::for_params(const std::vector<Tensor>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.size(), 0.0);
    s.v.emplace_back(p.size(), 0.0);
  }
  return s;
}

void adam_step(std::vector<Tensor>& params, const std::vector<std::vector<double>>& grads, AdamState& state,
               double lr) {
  if (grads.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw DimensionError("adam_step: parameter, gradient and state counts differ");
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (grads[k].size() != params[k].size() || state.m[k].size() != params[k].size() ||
        state.v[k].size() != params[k].size()) {
      throw DimensionError("adam_step: shape mismatch for '" + params[k].name + "'");
    }
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double bc1 = 1.0 - std::pow(state.beta1, t);
  const double bc2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& w = params[k].values;
    auto& m = state.m[k];
    auto& v = state.v[k];
    const auto& g = grads[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      w[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

std::string to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::kStep:
      return "step";
    case ScheduleKind::kCosine:
      return "cosine";
    default:
      return "constant";
  }
}

ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "constant") return ScheduleKind::kConstant;
  if (s == "step") return ScheduleKind::kStep;
  if (s == "cosine" || s == "cosine_annealing") return ScheduleKind::kCosine;
  throw ConfigError("unknown schedule '" + s + "' (expected constant, step or cosine)");
}

void LrSchedule::validate() const {
  if (!(base_lr > 0.0) || !std::isfinite(base_lr)) throw ArgumentError("schedule: base_lr must be positive");
  if (kind == ScheduleKind::kStep && (period <= 0 || !(decay > 0.0) || decay > 1.0)) {
    throw ArgumentError("schedule: step needs period > 0 and decay in (0, 1]");
  }
  if (kind == ScheduleKind::kCosine && (t_max <= 0 || eta_min < 0.0 || eta_min > base_lr)) {
    throw ArgumentError("schedule: cosine needs t_max > 0 and 0 <= eta_min <= base_lr");
  }
}

double lr_at(const LrSchedule& s, int epoch) {
  if (epoch < 0) throw ArgumentError("lr_at: epoch must be non-negative");
  switch (s.kind) {
    case ScheduleKind::kStep:
      return s.base_lr * std::pow(s.decay, epoch / s.period);
    case ScheduleKind::kCosine:
      if (epoch == 0) return s.base_lr;
      if (epoch >= s.t_max) return s.eta_min;
      return s.eta_min + 0.5 * (s.base_lr - s.eta_min) *
                             (1.0 + std::cos(std::numbers::pi * static_cast<double>(epoch) / s.t_max));
    default:
      return s.base_lr;
  }
}

}  // namespace landslide::model
