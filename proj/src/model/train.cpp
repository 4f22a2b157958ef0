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
#include <numeric>
#include <sstream>

#include "landslide/error.hpp"
#include "landslide/metrics.hpp"
#include "landslide/model.hpp"

namespace landslide::model {

TrainResult train(CompactCnn net, std::span<const augment::LabeledImage> data, const TrainOptions& options, Rng& rng,
                  std::optional<ValidationSet> validation) {
  if (data.empty()) throw EmptyDatasetError("train: empty dataset");
  if (options.epochs < 0) throw ArgumentError("train: epochs must be non-negative");
  if (options.batch_size == 0) throw ArgumentError("train: batch_size must be positive");
  if (options.policy.mixing_enabled() && options.batch_size < 2) {
    throw ArgumentError("train: batch_size must be at least 2 when CutMix or Mixup is enabled");
  }
  options.policy.validate();
  options.schedule.validate();
  if (validation && validation->images.size() != validation->labels.size()) {
    throw DimensionError("train: validation images and labels differ in length");
  }

  TrainResult result;
  result.net = net;
  if (options.epochs == 0) return result;

  AdamState adam = AdamState::for_params(net.params());
  double best_f1 = -1.0;
  std::vector<std::size_t> order(data.size());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    const double lr = lr_at(options.schedule, epoch);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    ConfusionCounts counts;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      // The final short batch is kept.
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      std::vector<augment::LabeledImage> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(data[order[i]]);
      batch = augment::apply_policy(std::move(batch), options.policy, rng);

      std::vector<MultiBandImage> images;
      std::vector<SoftLabel> targets;
      images.reserve(batch.size());
      for (auto& s : batch) {
        images.push_back(std::move(s.image));
        targets.push_back(s.label);
      }
      const auto fwd = forward(net, images, true);
      const auto loss = kl_soft_loss(fwd.logits, targets);
      if (!std::isfinite(loss.loss)) {
        std::ostringstream os;
        os << "train: non-finite loss at epoch " << epoch;
        throw NumericError(os.str());
      }
      const auto grads = backward(net, fwd.caches, loss.dlogits);
      adam_step(net.params(), grads, adam, lr);

      loss_sum += loss.loss * static_cast<double>(batch.size());
      for (std::size_t i = 0; i < targets.size(); ++i) {
        counts.add(targets[i].argmax(), fwd.logits[i][1] >= fwd.logits[i][0] ? 1 : 0);
      }
    }
    if (!net.all_finite()) {
      std::ostringstream os;
      os << "train: parameters diverged at epoch " << epoch;
      throw NumericError(os.str());
    }

    EpochMetrics m{epoch, lr, loss_sum / static_cast<double>(data.size()), f1(counts), std::nullopt};
    if (validation) {
      const auto p = predict_landslide(net, validation->images);
      ConfusionCounts vc;
      for (std::size_t i = 0; i < p.size(); ++i) vc.add(validation->labels[i], p[i] >= 0.5 ? 1 : 0);
      m.val_f1 = f1(vc);
      if (*m.val_f1 > best_f1) {
        best_f1 = *m.val_f1;
        result.net = net;
        result.best_epoch = epoch;
      }
    } else {
      result.net = net;
      result.best_epoch = epoch;
    }
    result.log.push_back(m);
    if (options.on_epoch) options.on_epoch(m);
  }
  result.net.round_to_float();
  return result;
}

GradientCheckResult gradient_check(const CompactCnn& net, std::span<const augment::LabeledImage> batch,
                                   double epsilon) {
  if (batch.empty()) throw ArgumentError("gradient_check: empty batch");
  std::vector<MultiBandImage> images;
  std::vector<SoftLabel> targets;
  for (const auto& s : batch) {
    images.push_back(s.image);
    targets.push_back(s.label);
  }
  auto loss_of = [&](const CompactCnn& n) { return kl_soft_loss(forward(n, images).logits, targets).loss; };

  const auto fwd = forward(net, images, true);
  const auto analytic = backward(net, fwd.caches, kl_soft_loss(fwd.logits, targets).dlogits);

  GradientCheckResult r;
  CompactCnn probe = net;
  for (std::size_t k = 0; k < net.params().size(); ++k) {
    for (std::size_t i = 0; i < net.params()[k].size(); ++i) {
      const double orig = net.params()[k].values[i];
      probe.params()[k].values[i] = orig + epsilon;
      const double up = loss_of(probe);
      probe.params()[k].values[i] = orig - epsilon;
      const double down = loss_of(probe);
      probe.params()[k].values[i] = orig;

      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[k][i];
      // Relative error with an absolute floor so exact zeros compare cleanly.
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > r.max_relative_error) r = {rel, net.params()[k].name, i, a, numeric};
    }
  }
  return r;
}

}  // namespace landslide::model
