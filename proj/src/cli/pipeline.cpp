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
#include "landslide/pipeline.hpp"

#include <cmath>
#include <map>

#include "json.hpp"
#include "landslide/augment.hpp"
#include "landslide/error.hpp"

namespace landslide {

using nlohmann::json;

namespace {

// Child streams of the run seed, one per pipeline stage.
enum Stream : std::uint64_t { kSmoteStream = 1, kInitStream = 2, kTrainStream = 3, kSvmStream = 4 };

}  // namespace

std::string preprocess_to_json(const Preprocess& p) {
  json j;
  j["bands"] = p.bands;
  j["band_names"] = p.band_names;
  j["image_size"] = p.image_size;
  j["normalization"] = {{"mode", to_string(p.norm.mode)}, {"center", p.norm.center}, {"scale", p.norm.scale}};
  return j.dump();
}

Preprocess preprocess_from_json(const std::string& meta_json) {
  try {
    const auto j = json::parse(meta_json);
    Preprocess p;
    p.bands = j.at("bands").get<std::vector<std::size_t>>();
    p.band_names = j.at("band_names").get<std::vector<std::string>>();
    p.image_size = j.at("image_size").get<std::size_t>();
    const auto& n = j.at("normalization");
    p.norm.mode = normalization_mode_from_string(n.at("mode").get<std::string>());
    p.norm.center = n.at("center").get<std::vector<double>>();
    p.norm.scale = n.at("scale").get<std::vector<double>>();
    if (p.norm.center.size() != p.norm.scale.size()) throw FormatError("normalization length mismatch");
    for (double s : p.norm.scale) {
      if (!(s > 0.0)) throw FormatError("normalization scale must be positive");
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint preprocessing metadata: ") + e.what());
  }
}

std::vector<MultiBandImage> normalized_images(std::span<const Sample> samples, const NormalizationStats& norm) {
  std::vector<MultiBandImage> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(apply_normalization(s.image, norm));
  return out;
}

std::vector<int> labels_of(std::span<const Sample> samples) {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

OversampleResult oversample(std::span<const Sample> samples, const RunConfig& cfg, Rng& rng) {
  std::size_t pos = 0;
  for (const auto& s : samples) {
    if (s.label != 0 && s.label != 1) throw ArgumentError("oversample: sample '" + s.id + "' has no label");
    pos += s.label == 1 ? 1 : 0;
  }
  const std::size_t neg = samples.size() - pos;
  OversampleResult r;
  r.minority_label = pos <= neg ? 1 : 0;
  std::vector<MultiBandImage> minority;
  std::vector<const Sample*> parents;
  for (const auto& s : samples) {
    if (s.label == r.minority_label) {
      minority.push_back(s.image);
      parents.push_back(&s);
    }
  }
  const auto smote_cfg = cfg.smote_config(std::min(pos, neg), std::max(pos, neg));
  const auto synth = augment::smote_ssim(minority, smote_cfg, rng);
  r.synthetic.reserve(synth.size());
  r.records.reserve(synth.size());
  char name[32];
  for (std::size_t i = 0; i < synth.size(); ++i) {
    std::snprintf(name, sizeof name, "syn%06zu", i);
    r.records.push_back({name, parents[synth[i].anchor]->id, parents[synth[i].neighbor]->id, synth[i].lambda});
    r.synthetic.push_back({name, synth[i].image, r.minority_label, -1});
  }
  return r;
}

FittedPipeline fit_pipeline(std::span<const Sample> train, std::span<const Sample> validation, const RunConfig& cfg,
                            Rng& rng, const FitOptions& options) {
  if (train.empty()) throw EmptyDatasetError("fit: empty training set");
  FittedPipeline out;

  std::vector<Sample> all(train.begin(), train.end());
  if (options.smote && cfg.smote.enabled) {
    Rng smote_rng = rng.child(kSmoteStream);
    auto extra = oversample(train, cfg, smote_rng);
    out.synthetics = std::move(extra.records);
    for (auto& s : extra.synthetic) all.push_back(std::move(s));
  }

  std::vector<MultiBandImage> raw;
  raw.reserve(all.size());
  for (const auto& s : all) raw.push_back(s.image);
  out.norm = fit_normalization(raw, cfg.normalization);

  std::vector<augment::LabeledImage> data;
  data.reserve(all.size());
  for (const auto& s : all) {
    if (s.label != 0 && s.label != 1) throw ArgumentError("fit: sample '" + s.id + "' has no label");
    data.push_back({apply_normalization(s.image, out.norm), SoftLabel::hard(s.label)});
  }

  Rng init_rng = rng.child(kInitStream);
  auto net = model::CompactCnn::initialized(cfg.cnn_config(static_cast<int>(raw.front().channels())), init_rng);

  std::vector<MultiBandImage> val_images;
  std::vector<int> val_labels;
  std::optional<model::ValidationSet> val;
  if (!validation.empty()) {
    val_images = normalized_images(validation, out.norm);
    val_labels = labels_of(validation);
    val = model::ValidationSet{val_images, val_labels};
  }
  Rng train_rng = rng.child(kTrainStream);
  auto train_options = cfg.train_options();
  train_options.on_epoch = options.on_epoch;
  auto trained = model::train(std::move(net), data, train_options, train_rng, val);
  out.net = std::move(trained.net);
  out.net.round_to_float();
  out.log = std::move(trained.log);
  out.best_epoch = trained.best_epoch;

  if (options.svm_head) {
    std::vector<MultiBandImage> images;
    std::vector<int> labels;
    images.reserve(data.size());
    for (const auto& d : data) {
      images.push_back(d.image);
      labels.push_back(d.label.argmax());
    }
    Rng svm_rng = rng.child(kSvmStream);
    out.head = svm::fit_head(embeddings(out.net, images), labels, cfg.svm, svm_rng);
  }
  return out;
}

std::vector<double> fc_probabilities(const model::CompactCnn& net, std::span<const MultiBandImage> images) {
  return model::predict_landslide(net, images);
}

std::vector<std::vector<double>> embeddings(const model::CompactCnn& net, std::span<const MultiBandImage> images) {
  return model::forward(net, images).embeddings;
}

std::vector<double> svm_decisions(const model::CompactCnn& net, const svm::SvmModel& head,
                                  std::span<const MultiBandImage> images) {
  const auto emb = embeddings(net, images);
  std::vector<double> out(emb.size());
  for (std::size_t i = 0; i < emb.size(); ++i) out[i] = svm::decision(head, emb[i]);
  return out;
}

double svm_probability(double decision) noexcept { return 1.0 / (1.0 + std::exp(-kSvmLogisticScale * decision)); }

ConfusionCounts confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DimensionError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], predicted[i]);
  return c;
}

}  // namespace landslide
