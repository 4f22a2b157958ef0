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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landslide/augment.hpp"
#include "landslide/image.hpp"
#include "landslide/rng.hpp"

namespace landslide::model {

// ---------------------------------------------------------------------------
// Stage schedule of the EfficientNetV2-L backbone. This is metadata with a
// shape calculator; it is not a trainable network.

enum class StageOperator { kConv, kFusedMbconv, kMbconvSe, kHead };

struct StageSpec {
  StageOperator op = StageOperator::kConv;
  int kernel = 3;
  std::optional<int> expand;  // none for plain convolutions
  int stride = 1;             // 1 or 2; applied by the first layer only
  int out_channels = 1;
  int num_layers = 1;
};

struct BackboneConfig {
  std::vector<StageSpec> stages;
  int input_channels = 3;
  int input_size = 256;

  /// The nine-stage EfficientNetV2-Large schedule.
  static BackboneConfig efficientnet_v2_large(int input_channels = 3, int input_size = 256);
  void validate() const;
};

struct StageShape {
  std::size_t stage = 0;
  int out_height = 0;
  int out_width = 0;
  int out_channels = 0;
  int cumulative_downsample = 1;
};

/// Propagates spatial dims through the stage strides ("same" padding, so a
/// stride-2 stage maps n to ceil(n / 2)).
std::vector<StageShape> stage_shapes(const BackboneConfig& cfg);

// ---------------------------------------------------------------------------
// Compact trainable backbone: [conv kxk + ReLU + maxpool 2x2] per entry of
// conv_channels, global average pool, linear embedding, linear 2-way head.

struct CnnConfig {
  int input_channels = 12;
  int input_height = 256;
  int input_width = 256;
  std::vector<int> conv_channels{16, 32};
  int kernel = 3;
  int embedding_dim = 64;

  void validate() const;
  bool operator==(const CnnConfig&) const = default;
};

struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

class CompactCnn {
 public:
  static constexpr int kClasses = 2;

  CompactCnn() = default;
  /// All parameters zero.
  explicit CompactCnn(CnnConfig config);
  /// He-uniform weights, zero biases.
  static CompactCnn initialized(CnnConfig config, Rng& rng);

  const CnnConfig& config() const noexcept { return config_; }
  std::vector<Tensor>& params() noexcept { return params_; }
  const std::vector<Tensor>& params() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept;

  // Named views; conv stage i owns params 2i (weight, k x k x in x out) and
  // 2i+1 (bias). The last four are embed.weight, embed.bias, head.weight,
  // head.bias.
  Tensor& conv_weight(std::size_t i) { return params_.at(2 * i); }
  Tensor& conv_bias(std::size_t i) { return params_.at(2 * i + 1); }
  const Tensor& conv_weight(std::size_t i) const { return params_.at(2 * i); }
  const Tensor& conv_bias(std::size_t i) const { return params_.at(2 * i + 1); }
  Tensor& embed_weight() { return params_.at(params_.size() - 4); }
  Tensor& embed_bias() { return params_.at(params_.size() - 3); }
  Tensor& head_weight() { return params_.at(params_.size() - 2); }
  Tensor& head_bias() { return params_.at(params_.size() - 1); }
  const Tensor& embed_weight() const { return params_.at(params_.size() - 4); }
  const Tensor& embed_bias() const { return params_.at(params_.size() - 3); }
  const Tensor& head_weight() const { return params_.at(params_.size() - 2); }
  const Tensor& head_bias() const { return params_.at(params_.size() - 1); }

  std::size_t feature_dim() const noexcept { return static_cast<std::size_t>(config_.conv_channels.back()); }
  std::size_t embedding_dim() const noexcept { return static_cast<std::size_t>(config_.embedding_dim); }

  /// Rounds every parameter to the nearest float, the checkpoint precision.
  void round_to_float();
  bool all_finite() const noexcept;

 private:
  CnnConfig config_;
  std::vector<Tensor> params_;
};

/// Per-sample activations kept for backprop.
struct SampleCache {
  std::vector<std::vector<double>> stage_input;  // input of each conv stage
  std::vector<std::vector<double>> preact;       // conv output before ReLU
  std::vector<std::vector<std::uint32_t>> pool_argmax;
  std::vector<std::size_t> stage_h, stage_w;     // spatial size at each conv
  std::vector<double> pooled_features;           // global average pool
  std::vector<double> embedding;
  std::vector<double> logits;
};

struct ForwardResult {
  std::vector<std::vector<double>> embeddings;  // N x D_emb
  std::vector<std::vector<double>> logits;      // N x 2
  std::vector<SampleCache> caches;              // empty unless requested
};

ForwardResult forward(const CompactCnn& net, std::span<const MultiBandImage> batch, bool keep_cache = false);

/// Gradients shaped like net.params(); summed over the batch in index order.
std::vector<std::vector<double>> backward(const CompactCnn& net, std::span<const SampleCache> caches,
                                          std::span<const std::vector<double>> dlogits);

std::vector<double> softmax(std::span<const double> logits);

struct LossResult {
  double loss = 0.0;
  std::vector<std::vector<double>> dlogits;
};

/// Mean over rows of KL(target || softmax(logits)), with 0 log 0 = 0.
/// Gradient w.r.t. logits is (softmax - target) / N.
LossResult kl_soft_loss(std::span<const std::vector<double>> logits, std::span<const SoftLabel> targets);

// ---------------------------------------------------------------------------
// Optimisation.

struct AdamState {
  std::uint64_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_params(const std::vector<Tensor>& params);
};

/// One bias-corrected Adam update.
void adam_step(std::vector<Tensor>& params, const std::vector<std::vector<double>>& grads, AdamState& state,
               double lr);

enum class ScheduleKind { kConstant, kStep, kCosine };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& s);

struct LrSchedule {
  ScheduleKind kind = ScheduleKind::kConstant;
  double base_lr = 3e-4;
  int period = 15;      // step
  double decay = 0.1;   // step
  int t_max = 50;       // cosine
  double eta_min = 0.0; // cosine

  void validate() const;
};

double lr_at(const LrSchedule& schedule, int epoch);

// ---------------------------------------------------------------------------
// Training.

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double train_f1 = 0.0;
  std::optional<double> val_f1;
};

struct TrainOptions {
  int epochs = 50;
  std::size_t batch_size = 36;
  augment::AugmentPolicy policy = augment::AugmentPolicy::defaults();
  LrSchedule schedule;
  std::function<void(const EpochMetrics&)> on_epoch;  // called after each epoch
};

struct TrainResult {
  CompactCnn net;  // best epoch by validation F1, else the last epoch
  std::vector<EpochMetrics> log;
  int best_epoch = -1;
};

struct ValidationSet {
  std::span<const MultiBandImage> images;
  std::span<const int> labels;
};

TrainResult train(CompactCnn net, std::span<const augment::LabeledImage> data, const TrainOptions& options, Rng& rng,
                  std::optional<ValidationSet> validation = std::nullopt);

/// Landslide probability from the FC head for each image.
std::vector<double> predict_landslide(const CompactCnn& net, std::span<const MultiBandImage> images);

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Central differences on every parameter of the soft-label KL loss.
GradientCheckResult gradient_check(const CompactCnn& net, std::span<const augment::LabeledImage> batch,
                                   double epsilon = 1e-5);

// ---------------------------------------------------------------------------
// ".cnn" checkpoint: "CNN1", u32 LE header length, UTF-8 JSON header
// {config, tensors:[{name, shape}], meta}, then float32 LE tensor payloads in
// header order. `meta_json` is an opaque JSON object carried alongside.

struct Checkpoint {
  CompactCnn net;
  std::string meta_json = "{}";
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace landslide::model
