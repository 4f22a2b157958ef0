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
#include "landslide/config.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"

namespace landslide {

using nlohmann::json;

namespace {

json policy_to_json(const augment::AugmentPolicy& p) {
  return json{{"noise_prob", p.noise_prob},           {"noise_sigma", p.noise_sigma},
              {"brightness_prob", p.brightness_prob}, {"brightness_delta", p.brightness_delta},
              {"contrast_prob", p.contrast_prob},     {"contrast_delta", p.contrast_delta},
              {"saturation_prob", p.saturation_prob}, {"saturation_delta", p.saturation_delta},
              {"rgb_bands", p.rgb_bands},             {"hflip_prob", p.hflip_prob},
              {"vflip_prob", p.vflip_prob},           {"rot90_prob", p.rot90_prob},
              {"shift_prob", p.shift_prob},           {"shift_max", p.shift_max},
              {"shear_prob", p.shear_prob},           {"shear_max", p.shear_max},
              {"cutmix_prob", p.cutmix_prob},         {"mixup_prob", p.mixup_prob},
              {"mixup_alpha", p.mixup_alpha}};
}

json to_json_doc(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["image_size"] = c.image_size;
  j["bands"] = c.bands;
  j["band_names"] = c.band_names;
  j["epochs"] = c.epochs;
  j["batch_size"] = c.batch_size;
  j["base_lr"] = c.base_lr;
  j["normalization"] = to_string(c.normalization);
  j["k_folds"] = c.k_folds;
  j["paper_mode"] = c.paper_mode;
  j["val_fold"] = c.val_fold;
  j["schedule"] = {{"kind", model::to_string(c.schedule.kind)},
                   {"t_max", c.schedule.t_max},
                   {"eta_min", c.schedule.eta_min},
                   {"period", c.schedule.period},
                   {"decay", c.schedule.decay}};
  j["model"] = {{"conv_channels", c.model.conv_channels},
                {"kernel", c.model.kernel},
                {"embedding_dim", c.model.embedding_dim}};
  j["augment"] = policy_to_json(c.augment);
  const auto& s = c.smote;
  j["smote"] = {{"enabled", s.enabled},       {"k_neighbors", s.k_neighbors},
                {"clip_lo", s.clip_lo},       {"clip_hi", s.clip_hi},
                {"beta_alpha", s.beta_alpha}, {"beta_beta", s.beta_beta},
                {"max_candidates", s.max_candidates}};
  j["smote"]["n_syn"] = s.n_syn ? json(*s.n_syn) : json("auto");
  j["svm"] = {{"c", c.svm.c}, {"tolerance", c.svm.tolerance}, {"max_passes", c.svm.max_passes}};
  j["svm"]["gamma"] = c.svm.gamma ? json(*c.svm.gamma) : json("auto");
  return j;
}

// Merges `src` into `dst`, refusing keys the defaults do not define.
void merge_strict(json& dst, const json& src, const std::string& path, std::string_view source) {
  if (!src.is_object()) {
    throw ConfigError(std::string(source) + ": " + (path.empty() ? "document" : "'" + path + "'") +
                      " must be a JSON object");
  }
  for (auto it = src.begin(); it != src.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!dst.contains(it.key())) throw ConfigError(std::string(source) + ": unknown key '" + key + "'");
    auto& slot = dst[it.key()];
    if (slot.is_object()) {
      merge_strict(slot, it.value(), key, source);
    } else {
      slot = it.value();
    }
  }
}

json parse_json(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line and column.
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << source << ":" << line << ":" << col << ": invalid JSON";
    throw ConfigError(os.str());
  }
}

class Reader {
 public:
  Reader(const json& root, std::string_view source) : root_(root), source_(source) {}

  template <typename T>
  T get(const std::string& path) const {
    const json& node = at(path);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!node.is_boolean()) fail(path, "expected true or false");
      } else if constexpr (std::is_integral_v<T>) {
        if (!node.is_number_integer()) fail(path, "expected an integer");
        if (std::is_unsigned_v<T> && node.is_number_integer() && node.get<long long>() < 0 &&
            !node.is_number_unsigned()) {
          fail(path, "expected a non-negative integer");
        }
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!node.is_number()) fail(path, "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!node.is_string()) fail(path, "expected a string");
      }
      return node.get<T>();
    } catch (const json::exception& e) {
      fail(path, e.what());
    }
  }

  template <typename T>
  std::vector<T> get_list(const std::string& path) const {
    const json& node = at(path);
    if (!node.is_array()) fail(path, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      const json& item = node[i];
      const std::string where = path + "[" + std::to_string(i) + "]";
      if constexpr (std::is_same_v<T, std::string>) {
        if (!item.is_string()) fail(where, "expected a string");
      } else {
        if (!item.is_number_integer()) fail(where, "expected an integer");
        if (std::is_unsigned_v<T> && !item.is_number_unsigned() && item.get<long long>() < 0) {
          fail(where, "expected a non-negative integer");
        }
      }
      out.push_back(item.get<T>());
    }
    return out;
  }

  // Either the string "auto" or a value of type T.
  template <typename T>
  std::optional<T> get_auto(const std::string& path) const {
    const json& node = at(path);
    if (node.is_string()) {
      if (node.get<std::string>() != "auto") fail(path, "expected \"auto\" or a number");
      return std::nullopt;
    }
    return get<T>(path);
  }

  [[noreturn]] void fail(const std::string& path, const std::string& why) const {
    throw ConfigError(std::string(source_) + ": field '" + path + "': " + why);
  }

 private:
  const json& at(const std::string& path) const {
    const json* node = &root_;
    std::size_t start = 0;
    while (start <= path.size()) {
      const auto dot = path.find('.', start);
      const auto key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
      node = &node->at(key);
      if (dot == std::string::npos) break;
      start = dot + 1;
    }
    return *node;
  }

  const json& root_;
  std::string_view source_;
};

RunConfig from_json_doc(const json& j, std::string_view source) {
  const Reader r(j, source);
  RunConfig c;
  c.seed = r.get<std::uint64_t>("seed");
  c.image_size = r.get<int>("image_size");
  c.bands = r.get_list<std::size_t>("bands");
  c.band_names = r.get_list<std::string>("band_names");
  c.epochs = r.get<int>("epochs");
  c.batch_size = r.get<std::size_t>("batch_size");
  c.base_lr = r.get<double>("base_lr");
  try {
    c.normalization = normalization_mode_from_string(r.get<std::string>("normalization"));
    c.schedule.kind = model::schedule_kind_from_string(r.get<std::string>("schedule.kind"));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  c.k_folds = r.get<int>("k_folds");
  c.paper_mode = r.get<bool>("paper_mode");
  c.val_fold = r.get<int>("val_fold");
  c.schedule.t_max = r.get<int>("schedule.t_max");
  c.schedule.eta_min = r.get<double>("schedule.eta_min");
  c.schedule.period = r.get<int>("schedule.period");
  c.schedule.decay = r.get<double>("schedule.decay");
  c.model.conv_channels = r.get_list<int>("model.conv_channels");
  c.model.kernel = r.get<int>("model.kernel");
  c.model.embedding_dim = r.get<int>("model.embedding_dim");

  auto& p = c.augment;
  p.noise_prob = r.get<double>("augment.noise_prob");
  p.noise_sigma = r.get<double>("augment.noise_sigma");
  p.brightness_prob = r.get<double>("augment.brightness_prob");
  p.brightness_delta = r.get<double>("augment.brightness_delta");
  p.contrast_prob = r.get<double>("augment.contrast_prob");
  p.contrast_delta = r.get<double>("augment.contrast_delta");
  p.saturation_prob = r.get<double>("augment.saturation_prob");
  p.saturation_delta = r.get<double>("augment.saturation_delta");
  p.rgb_bands = r.get_list<std::size_t>("augment.rgb_bands");
  p.hflip_prob = r.get<double>("augment.hflip_prob");
  p.vflip_prob = r.get<double>("augment.vflip_prob");
  p.rot90_prob = r.get<double>("augment.rot90_prob");
  p.shift_prob = r.get<double>("augment.shift_prob");
  p.shift_max = r.get<int>("augment.shift_max");
  p.shear_prob = r.get<double>("augment.shear_prob");
  p.shear_max = r.get<double>("augment.shear_max");
  p.cutmix_prob = r.get<double>("augment.cutmix_prob");
  p.mixup_prob = r.get<double>("augment.mixup_prob");
  p.mixup_alpha = r.get<double>("augment.mixup_alpha");

  auto& s = c.smote;
  s.enabled = r.get<bool>("smote.enabled");
  s.k_neighbors = r.get<std::size_t>("smote.k_neighbors");
  s.n_syn = r.get_auto<std::size_t>("smote.n_syn");
  s.clip_lo = r.get<double>("smote.clip_lo");
  s.clip_hi = r.get<double>("smote.clip_hi");
  s.beta_alpha = r.get<double>("smote.beta_alpha");
  s.beta_beta = r.get<double>("smote.beta_beta");
  s.max_candidates = r.get<std::size_t>("smote.max_candidates");

  c.svm.c = r.get<double>("svm.c");
  c.svm.gamma = r.get_auto<double>("svm.gamma");
  c.svm.tolerance = r.get<double>("svm.tolerance");
  c.svm.max_passes = r.get<int>("svm.max_passes");

  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string(source) + ": " + e.what());
  }
  return c;
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(image_size > 0, "image_size must be positive");
  require(band_names.empty() || bands.empty() || band_names.size() == bands.size(),
          "band_names must match the selected bands");
  require(epochs >= 0, "epochs must be non-negative");
  require(batch_size > 0, "batch_size must be positive");
  require(base_lr > 0.0 && std::isfinite(base_lr), "base_lr must be positive");
  require(k_folds >= 2, "k_folds must be at least 2");
  require(val_fold >= -1, "val_fold must be -1 or a fold index");
  require(schedule.t_max >= 0, "schedule.t_max must be non-negative");
  require(smote.k_neighbors > 0, "smote.k_neighbors must be positive");
  require(!smote.n_syn || *smote.n_syn > 0, "smote.n_syn must be positive or \"auto\"");
  try {
    lr_schedule().validate();
    cnn_config(1).validate();
    augment.validate();
    svm.validate();
    smote_config(smote.k_neighbors + 1, smote.k_neighbors + 1).validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

model::LrSchedule RunConfig::lr_schedule() const {
  model::LrSchedule s;
  s.kind = schedule.kind;
  s.base_lr = base_lr;
  s.period = schedule.period;
  s.decay = schedule.decay;
  s.t_max = schedule.t_max > 0 ? schedule.t_max : std::max(epochs, 1);
  s.eta_min = schedule.eta_min;
  return s;
}

model::TrainOptions RunConfig::train_options() const {
  model::TrainOptions o;
  o.epochs = epochs;
  o.batch_size = batch_size;
  o.policy = augment;
  o.schedule = lr_schedule();
  return o;
}

model::CnnConfig RunConfig::cnn_config(int input_channels) const {
  model::CnnConfig c;
  c.input_channels = input_channels;
  c.input_height = image_size;
  c.input_width = image_size;
  c.conv_channels = model.conv_channels;
  c.kernel = model.kernel;
  c.embedding_dim = model.embedding_dim;
  return c;
}

augment::SmoteConfig RunConfig::smote_config(std::size_t minority, std::size_t majority) const {
  augment::SmoteConfig s;
  s.k_neighbors = smote.k_neighbors;
  if (smote.n_syn) {
    s.n_syn = *smote.n_syn;
  } else {
    const double ratio = minority == 0 ? 0.0
                                       : static_cast<double>(majority - std::min(majority, minority)) /
                                             static_cast<double>(minority);
    s.n_syn = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(ratio)));
  }
  s.clip_lo = smote.clip_lo;
  s.clip_hi = smote.clip_hi;
  s.beta_alpha = smote.beta_alpha;
  s.beta_beta = smote.beta_beta;
  s.max_candidates = smote.max_candidates;
  return s;
}

std::string config_to_json(const RunConfig& cfg) { return to_json_doc(cfg).dump(2) + "\n"; }

RunConfig parse_config(std::string_view text, std::string_view source) {
  json doc = to_json_doc(RunConfig{});
  merge_strict(doc, parse_json(text, source), "", source);
  return from_json_doc(doc, source);
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file, std::string_view overrides_json) {
  json doc = to_json_doc(RunConfig{});
  std::string source = "config";
  if (file) {
    const auto bytes = read_file_bytes(*file);
    source = file->string();
    const std::string text(bytes.begin(), bytes.end());
    merge_strict(doc, parse_json(text, source), "", source);
  }
  merge_strict(doc, parse_json(overrides_json.empty() ? "{}" : overrides_json, "overrides"), "", "overrides");
  return from_json_doc(doc, source);
}

}  // namespace landslide
