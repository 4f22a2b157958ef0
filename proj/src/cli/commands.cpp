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
#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "json.hpp"
#include "landslide/config.hpp"
#include "landslide/dataset.hpp"
#include "landslide/error.hpp"
#include "landslide/eval.hpp"
#include "landslide/mbt.hpp"
#include "landslide/pipeline.hpp"
#include "landslide/synth.hpp"

namespace landslide::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using eval::format_double;

namespace {

constexpr std::uint64_t kSvmStream = 4;

class Request {
 public:
  Request(std::string_view text, std::string_view command, std::set<std::string> allowed) : command_(command) {
    try {
      doc_ = json::parse(text.empty() ? std::string_view("{}") : text);
    } catch (const json::parse_error& e) {
      throw ArgumentError(command_ + ": request is not valid JSON: " + e.what());
    }
    if (!doc_.is_object()) throw ArgumentError(command_ + ": request must be a JSON object");
    allowed.insert({"config", "overrides"});
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (!allowed.count(it.key())) throw ArgumentError(command_ + ": unknown option '" + it.key() + "'");
    }
  }

  bool has(const std::string& key) const { return doc_.contains(key) && !doc_[key].is_null(); }

  std::string str(const std::string& key) const {
    if (!has(key)) throw ArgumentError(command_ + ": missing required option '" + key + "'");
    if (!doc_[key].is_string()) throw ArgumentError(command_ + ": option '" + key + "' must be a string");
    return doc_[key].get<std::string>();
  }

  std::optional<std::string> opt_str(const std::string& key) const {
    return has(key) ? std::optional(str(key)) : std::nullopt;
  }

  template <typename T>
  T num(const std::string& key, T fallback) const {
    if (!has(key)) return fallback;
    const auto& v = doc_[key];
    if (!v.is_number() || (std::is_integral_v<T> && !v.is_number_integer())) {
      throw ArgumentError(command_ + ": option '" + key + "' must be a number");
    }
    if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
      throw ArgumentError(command_ + ": option '" + key + "' must be non-negative");
    }
    return v.get<T>();
  }

  const json& raw(const std::string& key) const { return doc_.at(key); }

  RunConfig config() const {
    std::optional<fs::path> file;
    if (has("config")) file = str("config");
    const std::string overrides = has("overrides") ? doc_["overrides"].dump() : "{}";
    return resolve_config(file, overrides);
  }

 private:
  std::string command_;
  json doc_;
};

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string kv_epoch(const model::EpochMetrics& m) {
  std::ostringstream os;
  os << "event=epoch epoch=" << m.epoch << " lr=" << format_double(m.lr) << " train_loss=" << format_double(m.train_loss)
     << " train_f1=" << format_double(m.train_f1);
  if (m.val_f1) os << " val_f1=" << format_double(*m.val_f1);
  return os.str();
}

std::string kv_confusion(const std::string& head, const ConfusionCounts& c) {
  std::ostringstream os;
  os << "head=" << head << " tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " tn=" << c.tn
     << " f1=" << format_double(f1(c));
  return os.str();
}

std::string checkpoint_meta(const Preprocess& pre, int best_epoch, std::uint64_t seed) {
  auto meta = json::parse(preprocess_to_json(pre));
  meta["best_epoch"] = best_epoch;
  meta["seed"] = seed;
  return meta.dump();
}

Preprocess preprocess_for(const RunConfig& cfg, const NormalizationStats& norm) {
  return {cfg.bands, cfg.band_names, static_cast<std::size_t>(cfg.image_size), norm};
}

// Model inputs for a manifest under a checkpoint's preprocessing.
struct Inputs {
  std::vector<Sample> samples;
  std::vector<MultiBandImage> images;
};

Inputs inputs_for(const DatasetManifest& manifest, const Preprocess& pre, const model::CompactCnn& net) {
  Inputs in;
  in.samples = load_samples(manifest, pre.bands, pre.image_size);
  if (!in.samples.empty() &&
      in.samples.front().image.channels() != static_cast<std::size_t>(net.config().input_channels)) {
    throw DimensionError("manifest images have " + std::to_string(in.samples.front().image.channels()) +
                         " bands after selection; the checkpoint expects " +
                         std::to_string(net.config().input_channels));
  }
  in.images = normalized_images(in.samples, pre.norm);
  return in;
}

std::vector<int> require_labels(std::span<const Sample> samples, const std::string& what) {
  auto labels = labels_of(samples);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw FormatError(what + ": sample '" + samples[i].id + "' has no label");
  }
  return labels;
}

std::string relative_to(const fs::path& target, const fs::path& base) {
  const auto rel = fs::relative(fs::absolute(target), fs::absolute(base));
  return rel.empty() ? fs::absolute(target).generic_string() : rel.generic_string();
}

// ---------------------------------------------------------------------------

void cmd_make_synth(const Request& req, const Sink& sink) {
  SynthOptions o;
  const fs::path out = req.str("out_dir");
  o.count = req.num<std::size_t>("count", o.count);
  o.size = req.num<std::size_t>("size", o.size);
  o.bands = req.num<std::size_t>("bands", o.bands);
  o.imbalance = req.num<double>("imbalance", o.imbalance);
  o.amplitude = req.num<double>("amplitude", o.amplitude);
  o.noise = req.num<double>("noise", o.noise);
  o.seed = req.num<std::uint64_t>("seed", o.seed);
  if (req.has("signal_bands")) o.signal_bands = req.raw("signal_bands").get<std::vector<std::size_t>>();
  if (req.has("dead_band")) {
    const long long d = req.num<long long>("dead_band", -1);
    o.dead_band = d < 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(d));
  }
  const auto data = make_synth(o);
  DatasetManifest m;
  m.base_dir = out;
  std::size_t pos = 0;
  for (const auto& s : data) {
    const std::string rel = "images/" + s.id + ".mbt";
    write_mbt(out / rel, s.image);
    m.rows.push_back({s.id, rel, s.label, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
    pos += s.label == 1 ? 1 : 0;
  }
  write_manifest(out / "manifest.csv", m);
  json info{{"count", o.count},     {"size", o.size},           {"bands", o.bands},
            {"positives", pos},     {"negatives", o.count - pos}, {"signal_bands", o.signal_bands},
            {"seed", o.seed},       {"amplitude", o.amplitude}, {"noise", o.noise}};
  info["dead_band"] = o.dead_band ? json(*o.dead_band) : json(nullptr);
  write_text(out / "synth.json", info.dump(2) + "\n");
  sink(Channel::kResult, "event=make-synth out=" + out.string() + " count=" + std::to_string(o.count) +
                             " positives=" + std::to_string(pos) + " negatives=" + std::to_string(o.count - pos));
}

void cmd_oversample(const Request& req, const Sink& sink) {
  const auto cfg = req.config();
  const fs::path out = req.str("out_dir");
  const auto manifest = read_manifest(req.str("manifest"));
  if (manifest.rows.empty()) throw EmptyDatasetError("oversample: empty manifest");
  // Synthetics are made from the stored images, all bands, native size.
  const auto samples = load_samples(manifest, {}, 0);
  Rng rng = Rng(cfg.seed).child(1);
  const auto result = oversample(samples, cfg, rng);

  DatasetManifest m;
  m.base_dir = out;
  for (const auto& row : manifest.rows) {
    auto copy = row;
    copy.path = relative_to(manifest.resolve(row), out);
    m.rows.push_back(std::move(copy));
  }
  for (std::size_t i = 0; i < result.synthetic.size(); ++i) {
    const auto& s = result.synthetic[i];
    const auto& r = result.records[i];
    const std::string rel = "synthetic/" + s.id + ".mbt";
    write_mbt(out / rel, s.image);
    m.rows.push_back({s.id, rel, s.label, std::nullopt, r.anchor_id, r.neighbor_id, r.lambda});
  }
  write_manifest(out / "manifest.csv", m);
  std::size_t counts[2] = {0, 0};
  for (const auto& row : m.rows) ++counts[*row.label];
  sink(Channel::kResult, "event=oversample synthetic=" + std::to_string(result.synthetic.size()) +
                             " minority_label=" + std::to_string(result.minority_label) +
                             " count_0=" + std::to_string(counts[0]) + " count_1=" + std::to_string(counts[1]));
}

void cmd_train(const Request& req, const Sink& sink) {
  const auto cfg = req.config();
  const fs::path out = req.str("out_dir");
  const auto manifest = read_manifest(req.str("manifest"));
  if (manifest.rows.empty()) throw EmptyDatasetError("train: empty manifest");
  const auto samples = load_samples(manifest, cfg.bands, static_cast<std::size_t>(cfg.image_size));
  require_labels(samples, "train");

  std::vector<Sample> train, val;
  if (cfg.val_fold >= 0) {
    if (!manifest.has_folds()) throw ConfigError("val_fold is set but the manifest has no fold column");
    for (const auto& s : samples) (s.fold == cfg.val_fold ? val : train).push_back(s);
    if (val.empty()) throw ConfigError("val_fold " + std::to_string(cfg.val_fold) + " selects no samples");
    if (train.empty()) throw EmptyDatasetError("train: every sample is in the validation fold");
  } else {
    train = samples;
  }
  write_text(out / "config.json", config_to_json(cfg));

  Rng rng(cfg.seed);
  FitOptions opts;
  opts.smote = false;
  opts.svm_head = false;
  opts.on_epoch = [&](const model::EpochMetrics& m) { sink(Channel::kLog, kv_epoch(m)); };
  const auto fitted = fit_pipeline(train, val, cfg, rng, opts);

  model::Checkpoint ckpt{fitted.net, checkpoint_meta(preprocess_for(cfg, fitted.norm), fitted.best_epoch, cfg.seed)};
  model::save_checkpoint(out / "model.cnn", ckpt);
  eval::write_epoch_log_csv(out / "metrics.csv", fitted.log);
  sink(Channel::kResult, "event=train checkpoint=" + (out / "model.cnn").string() +
                             " epochs=" + std::to_string(fitted.log.size()) +
                             " best_epoch=" + std::to_string(fitted.best_epoch));
}

std::vector<double> c_values(const Request& req, const RunConfig& cfg) {
  if (!req.has("c")) return {cfg.svm.c};
  const auto& v = req.raw("c");
  std::vector<double> out;
  if (v.is_number()) {
    out.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ArgumentError("fit-svm: C values must be numbers");
      out.push_back(x.get<double>());
    }
  } else {
    throw ArgumentError("fit-svm: 'c' must be a number or a list of numbers");
  }
  if (out.empty()) throw ArgumentError("fit-svm: empty C list");
  return out;
}

void cmd_fit_svm(const Request& req, const Sink& sink) {
  const auto cfg = req.config();
  const auto ckpt = model::load_checkpoint(req.str("checkpoint"));
  const auto pre = preprocess_from_json(ckpt.meta_json);
  const auto manifest = read_manifest(req.str("manifest"));
  if (manifest.rows.empty()) throw EmptyDatasetError("fit-svm: empty manifest");
  const auto in = inputs_for(manifest, pre, ckpt.net);
  const auto labels = require_labels(in.samples, "fit-svm");
  const auto emb = embeddings(ckpt.net, in.images);

  std::optional<Inputs> eval_in;
  std::vector<std::vector<double>> eval_emb;
  std::vector<int> eval_labels;
  if (const auto path = req.opt_str("eval_manifest")) {
    const auto m = read_manifest(*path);
    if (m.rows.empty()) throw EmptyDatasetError("fit-svm: empty evaluation manifest");
    eval_in = inputs_for(m, pre, ckpt.net);
    eval_labels = require_labels(eval_in->samples, "fit-svm");
    eval_emb = embeddings(ckpt.net, eval_in->images);
  }

  const auto cs = c_values(req, cfg);
  const fs::path out = req.str("out");
  std::ostringstream sweep;
  sweep << "c,n_support,gamma,train_f1" << (eval_in ? ",eval_f1" : "") << ",path\n";
  for (double c : cs) {
    auto svm_cfg = cfg.svm;
    svm_cfg.c = c;
    Rng rng = Rng(cfg.seed).child(kSvmStream);
    const auto head = svm::fit_head(emb, labels, svm_cfg, rng);
    const fs::path path = cs.size() == 1 ? out : out / ("svm_c" + format_double(c) + ".svm");
    svm::save_model(path, head);

    auto score = [&](const std::vector<std::vector<double>>& rows, const std::vector<int>& truth) {
      std::vector<int> pred(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) pred[i] = svm::predict_sign(head, rows[i]) > 0 ? 1 : 0;
      return f1(confusion(truth, pred));
    };
    const double train_f1 = score(emb, labels);
    std::ostringstream line;
    line << "event=fit-svm c=" << format_double(c) << " n_support=" << head.support_vectors.size()
         << " gamma=" << format_double(head.gamma) << " train_f1=" << format_double(train_f1);
    sweep << format_double(c) << "," << head.support_vectors.size() << "," << format_double(head.gamma) << ","
          << format_double(train_f1);
    if (eval_in) {
      const double ef = score(eval_emb, eval_labels);
      line << " eval_f1=" << format_double(ef);
      sweep << "," << format_double(ef);
    }
    line << " model=" << path.string();
    sweep << "," << path.filename().string() << "\n";
    sink(Channel::kResult, line.str());
  }
  if (cs.size() > 1) write_text(out / "sweep.csv", sweep.str());
}

struct LoadedModel {
  model::Checkpoint ckpt;
  Preprocess pre;
  std::optional<svm::SvmModel> head;
};

LoadedModel load_model_pair(const Request& req) {
  LoadedModel m{model::load_checkpoint(req.str("checkpoint")), {}, std::nullopt};
  m.pre = preprocess_from_json(m.ckpt.meta_json);
  if (const auto path = req.opt_str("svm")) {
    m.head = svm::load_model(*path);
    if (m.head->dim() != m.ckpt.net.embedding_dim()) {
      throw DimensionError("svm model dimension " + std::to_string(m.head->dim()) +
                           " does not match the checkpoint embedding size " +
                           std::to_string(m.ckpt.net.embedding_dim()));
    }
  }
  return m;
}

void cmd_evaluate(const Request& req, const Sink& sink) {
  const auto m = load_model_pair(req);
  const auto manifest = read_manifest(req.str("manifest"));
  if (manifest.rows.empty()) throw EmptyDatasetError("evaluate: empty manifest");
  const auto in = inputs_for(manifest, m.pre, m.ckpt.net);
  const auto truth = require_labels(in.samples, "evaluate");

  const auto fr = model::forward(m.ckpt.net, in.images);
  std::vector<int> fc_pred(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) fc_pred[i] = model::softmax(fr.logits[i])[1] >= 0.5 ? 1 : 0;
  sink(Channel::kResult, kv_confusion("fc", confusion(truth, fc_pred)));
  if (m.head) {
    std::vector<int> pred(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) pred[i] = svm::predict_sign(*m.head, fr.embeddings[i]) > 0 ? 1 : 0;
    sink(Channel::kResult, kv_confusion("svm", confusion(truth, pred)));
  }
  if (const auto path = req.opt_str("embeddings")) eval::export_embeddings(*path, in.samples, fr.embeddings);
}

void cmd_predict(const Request& req, const Sink& sink) {
  const auto m = load_model_pair(req);
  const auto manifest = read_manifest(req.str("manifest"), true);
  if (manifest.rows.empty()) throw EmptyDatasetError("predict: empty manifest");
  const auto in = inputs_for(manifest, m.pre, m.ckpt.net);
  const auto fr = model::forward(m.ckpt.net, in.images);
  std::ostringstream os;
  os << "id,label\n";
  std::size_t positives = 0;
  for (std::size_t i = 0; i < in.samples.size(); ++i) {
    const int label = m.head ? (svm::predict_sign(*m.head, fr.embeddings[i]) > 0 ? 1 : 0)
                             : (model::softmax(fr.logits[i])[1] >= 0.5 ? 1 : 0);
    positives += static_cast<std::size_t>(label);
    os << in.samples[i].id << "," << label << "\n";
  }
  const fs::path out = req.str("out");
  write_text(out, os.str());
  sink(Channel::kResult, "event=predict rows=" + std::to_string(in.samples.size()) +
                             " positives=" + std::to_string(positives) + " out=" + out.string());
}

void cmd_crossval(const Request& req, const Sink& sink) {
  const auto cfg = req.config();
  const fs::path out = req.str("out_dir");
  const auto manifest = read_manifest(req.str("manifest"));
  if (manifest.rows.empty()) throw EmptyDatasetError("crossval: empty manifest");
  const auto samples = load_samples(manifest, cfg.bands, static_cast<std::size_t>(cfg.image_size));
  require_labels(samples, "crossval");
  write_text(out / "config.json", config_to_json(cfg));

  Rng rng(cfg.seed);
  const auto result = eval::cross_validate(samples, cfg, rng, [&](const eval::FoldResult& fr, const FittedPipeline& fp) {
    const fs::path dir = out / ("fold_" + std::to_string(fr.fold));
    model::save_checkpoint(dir / "model.cnn",
                           {fp.net, checkpoint_meta(preprocess_for(cfg, fp.norm), fp.best_epoch, cfg.seed)});
    svm::save_model(dir / "head.svm", *fp.head);
    eval::write_epoch_log_csv(dir / "metrics.csv", fp.log);
    eval::write_synthetics_csv(dir / "synthetic.csv", fr.synthetics);
    std::ostringstream os;
    os << "event=fold fold=" << fr.fold << " n_train=" << fr.n_train << " n_val=" << fr.n_val
       << " n_synthetic=" << fr.synthetics.size() << " best_epoch=" << fr.best_epoch
       << " fc_f1=" << format_double(fr.fc_f1) << " svm_f1=" << format_double(fr.svm_f1);
    sink(Channel::kLog, os.str());
  });
  eval::write_folds_csv(out / "folds.csv", result);
  std::ostringstream assignment;
  assignment << "id,fold\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    assignment << samples[i].id << "," << result.plan.assignment[i] << "\n";
  }
  write_text(out / "assignment.csv", assignment.str());
  sink(Channel::kResult, "event=crossval k=" + std::to_string(cfg.k_folds) + " mean_fc_f1=" +
                             format_double(result.mean_fc_f1) + " mean_svm_f1=" + format_double(result.mean_svm_f1));
}

void cmd_occlusion(const Request& req, const Sink& sink) {
  const auto m = load_model_pair(req);
  const auto manifest = read_manifest(req.str("manifest"));
  const fs::path out = req.str("out_dir");
  std::string head = req.opt_str("head").value_or(m.head ? "svm" : "fc");
  if (head != "svm" && head != "fc") throw ArgumentError("occlusion: head must be 'svm' or 'fc'");
  if (head == "svm" && !m.head) throw ArgumentError("occlusion: head 'svm' needs an svm model");

  DatasetManifest positives;
  positives.base_dir = manifest.base_dir;
  for (const auto& row : manifest.rows) {
    if (row.label == 1) positives.rows.push_back(row);
  }
  if (positives.rows.empty()) throw ArgumentError("occlusion: the manifest has no landslide samples");
  const auto in = inputs_for(positives, m.pre, m.ckpt.net);

  eval::ProbabilityFn prob;
  if (head == "svm") {
    prob = [&](std::span<const MultiBandImage> imgs) {
      auto scores = svm_decisions(m.ckpt.net, *m.head, imgs);
      for (auto& s : scores) s = svm_probability(s);
      return scores;
    };
  } else {
    prob = [&](std::span<const MultiBandImage> imgs) { return fc_probabilities(m.ckpt.net, imgs); };
  }
  std::vector<std::string> names = m.pre.band_names;
  if (names.size() != in.images.front().channels()) names.clear();
  auto report = eval::occlusion_importance(prob, in.images, names);
  report.head = head;
  report.logistic_scale = head == "svm" ? kSvmLogisticScale : 0.0;
  eval::write_occlusion_csv(out / "occlusion.csv", report);
  eval::write_occlusion_svg(out / "occlusion.svg", report);
  for (const auto& e : report.bands) {
    sink(Channel::kResult, "rank=" + std::to_string(e.rank) + " band=" + std::to_string(e.band) + " name=" + e.name +
                               " mean_drop=" + format_double(e.mean_drop));
  }
}

}  // namespace

const char* command_names() noexcept {
  return "make-synth oversample train fit-svm evaluate predict crossval occlusion";
}

void run_command(std::string_view name, std::string_view request_json, const Sink& sink) {
  using Handler = void (*)(const Request&, const Sink&);
  struct Entry {
    std::string_view name;
    Handler fn;
    std::set<std::string> keys;
  };
  static const Entry kCommands[] = {
      {"make-synth", cmd_make_synth,
       {"out_dir", "count", "size", "bands", "imbalance", "amplitude", "noise", "seed", "signal_bands", "dead_band"}},
      {"oversample", cmd_oversample, {"manifest", "out_dir"}},
      {"train", cmd_train, {"manifest", "out_dir"}},
      {"fit-svm", cmd_fit_svm, {"checkpoint", "manifest", "out", "c", "eval_manifest"}},
      {"evaluate", cmd_evaluate, {"checkpoint", "manifest", "svm", "embeddings"}},
      {"predict", cmd_predict, {"checkpoint", "manifest", "svm", "out"}},
      {"crossval", cmd_crossval, {"manifest", "out_dir"}},
      {"occlusion", cmd_occlusion, {"checkpoint", "manifest", "svm", "out_dir", "head"}},
  };
  for (const auto& e : kCommands) {
    if (e.name == name) {
      const Request req(request_json, name, e.keys);
      e.fn(req, sink);
      return;
    }
  }
  throw ArgumentError("unknown command '" + std::string(name) + "'");
}

}  // namespace landslide::cli
