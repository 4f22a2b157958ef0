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
// Command-line front end. Flags are translated into a JSON request and run
// through the C API; configuration flags become config overrides.

#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "landslide/landslide.h"

namespace {

using nlohmann::json;

int exit_code_for(lsd_status status) {
  switch (status) {
    case LSD_OK:
      return 0;
    case LSD_ERR_ARGUMENT:
    case LSD_ERR_CONFIG:
      return 2;
    case LSD_ERR_DIMENSION:
    case LSD_ERR_EMPTY_DATASET:
    case LSD_ERR_INSUFFICIENT_DATA:
    case LSD_ERR_DEGENERATE_DATA:
    case LSD_ERR_IO:
    case LSD_ERR_FORMAT:
      return 3;
    case LSD_ERR_NUMERIC:
      return 4;
    case LSD_ERR_INTERNAL:
      break;
  }
  return 1;
}

// Collects flags for one subcommand and builds its request object.
class RequestBuilder {
 public:
  explicit RequestBuilder(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* request(const std::string& flag, const std::string& key, const std::string& help,
                       bool required = false) {
    return bind<T>(flag, help, required, [key](json& req, const T& v) { req[key] = v; });
  }

  // Written into request["overrides"] at a JSON pointer such as "/svm/c".
  template <typename T>
  CLI::Option* override_field(const std::string& flag, const std::string& pointer, const std::string& help) {
    return bind<T>(flag, help, false, [pointer](json& req, const T& v) {
      req["overrides"][json::json_pointer(pointer)] = v;
    });
  }

  CLI::Option* override_flag(const std::string& flag, const std::string& pointer, const std::string& help) {
    auto* opt = app_->add_flag(flag, help);
    appliers_.push_back([opt, pointer](json& req) {
      if (opt->count() > 0) req["overrides"][json::json_pointer(pointer)] = true;
    });
    return opt;
  }

  void config_options() {
    request<std::string>("--config", "config", "JSON run configuration")->check(CLI::ExistingFile);
    override_field<std::uint64_t>("--seed", "/seed", "random seed");
  }

  void training_options() {
    override_field<int>("--epochs", "/epochs", "training epochs");
    override_field<std::size_t>("--batch-size", "/batch_size", "mini-batch size");
    override_field<double>("--lr", "/base_lr", "base learning rate");
    override_field<int>("--image-size", "/image_size", "resize images to this square size");
    override_field<std::vector<std::size_t>>("--bands", "/bands", "comma-separated band indices")
        ->delimiter(',');
    override_field<std::string>("--schedule", "/schedule/kind", "learning rate schedule")
        ->check(CLI::IsMember({"constant", "cosine", "step"}));
    override_field<std::string>("--normalization", "/normalization", "normalization mode")
        ->check(CLI::IsMember({"standard", "robust"}));
  }

  void smote_options() {
    override_field<std::size_t>("--n-syn", "/smote/n_syn", "synthetics per minority image");
    override_field<std::size_t>("--k-neighbors", "/smote/k_neighbors", "SSIM neighbours per anchor");
  }

  json build() const {
    json req = json::object();
    for (const auto& apply : appliers_) apply(req);
    return req;
  }

 private:
  template <typename T>
  CLI::Option* bind(const std::string& flag, const std::string& help, bool required,
                    std::function<void(json&, const T&)> write) {
    auto value = std::make_shared<T>();
    auto* opt = app_->add_option(flag, *value, help);
    if (required) opt->required();
    appliers_.push_back([opt, value, write](json& req) {
      if (opt->count() > 0) write(req, *value);
    });
    return opt;
  }

  CLI::App* app_;
  std::vector<std::function<void(json&)>> appliers_;
};

struct Output {
  bool quiet = false;
};

void on_line(void* user, int channel, const char* line) {
  const auto* out = static_cast<const Output*>(user);
  if (channel == LSD_CHANNEL_RESULT) {
    std::fprintf(stdout, "%s\n", line);
    std::fflush(stdout);
  } else if (!out->quiet) {
    std::fprintf(stderr, "%s\n", line);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Landslide classification: oversampling, training, SVM heads and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(lsd_version()));
  Output output;
  app.add_flag("-q,--quiet", output.quiet, "suppress per-epoch and per-fold log lines");

  std::vector<std::pair<CLI::App*, std::unique_ptr<RequestBuilder>>> commands;
  auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::make_unique<RequestBuilder>(sub));
    return commands.back().second.get();
  };

  {
    auto* b = add("make-synth", "generate the synthetic multi-band benchmark");
    b->request<std::string>("--out", "out_dir", "output directory", true);
    b->request<std::size_t>("--count", "count", "number of images");
    b->request<std::size_t>("--size", "size", "image side length");
    b->request<std::size_t>("--bands", "bands", "bands per image");
    b->request<double>("--imbalance", "imbalance", "negatives per positive");
    b->request<std::vector<std::size_t>>("--signal-bands", "signal_bands", "bands carrying the class signal")
        ->delimiter(',');
    b->request<long long>("--dead-band", "dead_band", "band held constant, -1 for none");
    b->request<double>("--amplitude", "amplitude", "signal amplitude");
    b->request<double>("--noise", "noise", "per-pixel noise level");
    b->request<std::uint64_t>("--seed", "seed", "random seed");
  }
  {
    auto* b = add("oversample", "SSIM-guided SMOTE for the minority class");
    b->request<std::string>("--manifest", "manifest", "input manifest CSV", true);
    b->request<std::string>("--out", "out_dir", "output directory", true);
    b->config_options();
    b->smote_options();
  }
  {
    auto* b = add("train", "train the CNN and write the best-epoch checkpoint");
    b->request<std::string>("--manifest", "manifest", "training manifest CSV", true);
    b->request<std::string>("--out", "out_dir", "output directory", true);
    b->config_options();
    b->training_options();
    b->override_field<int>("--val-fold", "/val_fold", "manifest fold held out for validation");
  }
  {
    auto* b = add("fit-svm", "fit an RBF SVM head on CNN embeddings");
    b->request<std::string>("--checkpoint", "checkpoint", "CNN checkpoint", true);
    b->request<std::string>("--manifest", "manifest", "training manifest CSV", true);
    b->request<std::string>("--out", "out", "model file, or directory when sweeping several C", true);
    b->request<std::vector<double>>("--c", "c", "comma-separated C values")->delimiter(',');
    b->request<std::string>("--eval-manifest", "eval_manifest", "manifest scored for each C");
    b->config_options();
    b->override_field<double>("--gamma", "/svm/gamma", "RBF gamma (default: auto)");
  }
  {
    auto* b = add("evaluate", "confusion counts and F1 on a labelled manifest");
    b->request<std::string>("--checkpoint", "checkpoint", "CNN checkpoint", true);
    b->request<std::string>("--manifest", "manifest", "labelled manifest CSV", true);
    b->request<std::string>("--svm", "svm", "SVM head to score alongside the FC head");
    b->request<std::string>("--embeddings", "embeddings", "write embeddings CSV here");
  }
  {
    auto* b = add("predict", "write id,label predictions");
    b->request<std::string>("--checkpoint", "checkpoint", "CNN checkpoint", true);
    b->request<std::string>("--manifest", "manifest", "manifest CSV, labels optional", true);
    b->request<std::string>("--svm", "svm", "predict with this SVM head instead of the FC head");
    b->request<std::string>("--out", "out", "predictions CSV", true);
  }
  {
    auto* b = add("crossval", "stratified k-fold cross-validation of the full pipeline");
    b->request<std::string>("--manifest", "manifest", "labelled manifest CSV", true);
    b->request<std::string>("--out", "out_dir", "output directory", true);
    b->config_options();
    b->training_options();
    b->smote_options();
    b->override_field<int>("--k", "/k_folds", "number of folds");
    b->override_field<double>("--c", "/svm/c", "SVM C");
    b->override_flag("--paper-mode", "/paper_mode", "apply SMOTE to the whole dataset before splitting");
  }
  {
    auto* b = add("occlusion", "band occlusion importance on landslide images");
    b->request<std::string>("--checkpoint", "checkpoint", "CNN checkpoint", true);
    b->request<std::string>("--manifest", "manifest", "labelled manifest CSV", true);
    b->request<std::string>("--svm", "svm", "SVM head");
    b->request<std::string>("--head", "head", "svm or fc")->check(CLI::IsMember({"svm", "fc"}));
    b->request<std::string>("--out", "out_dir", "output directory", true);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [sub, builder] : commands) {
    if (!sub->parsed()) continue;
    const std::string request = builder->build().dump();
    const lsd_status status = lsd_run_command(sub->get_name().c_str(), request.c_str(), on_line, &output);
    if (status != LSD_OK) {
      std::fprintf(stderr, "error: %s: %s\n", lsd_status_name(status), lsd_last_error());
    }
    return exit_code_for(status);
  }
  return 2;
}
