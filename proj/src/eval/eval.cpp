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
#include "landslide/eval.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>

#include "landslide/error.hpp"
#include "landslide/mbt.hpp"

namespace landslide::eval {

namespace {

constexpr std::uint64_t kFoldPlanStream = 10;
constexpr std::uint64_t kGlobalSmoteStream = 11;
constexpr std::uint64_t kFoldStreamBase = 100;

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::vector<std::size_t> FoldPlan::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::complement(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) out.push_back(i);
  }
  return out;
}

FoldPlan make_folds(std::span<const int> labels, int k, Rng& rng) {
  if (k < 2) throw ArgumentError("make_folds: k must be at least 2");
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

  FoldPlan plan;
  plan.k = k;
  plan.assignment.assign(labels.size(), -1);
  std::size_t offset = 0;
  for (int c : classes) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) idx.push_back(i);
    }
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw InsufficientDataError("make_folds: class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
                                  " samples, fewer than k=" + std::to_string(k));
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t j = 0; j < idx.size(); ++j) {
      plan.assignment[idx[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    }
    offset += idx.size();
  }
  return plan;
}

CrossValResult cross_validate(std::span<const Sample> samples, const RunConfig& cfg, Rng& rng,
                              const FoldCallback& on_fold) {
  if (samples.empty()) throw EmptyDatasetError("crossval: empty dataset");
  std::vector<Sample> pool(samples.begin(), samples.end());
  std::vector<SyntheticRecord> global_synthetics;
  if (cfg.paper_mode && cfg.smote.enabled) {
    Rng smote_rng = rng.child(kGlobalSmoteStream);
    auto extra = oversample(samples, cfg, smote_rng);
    global_synthetics = std::move(extra.records);
    for (auto& s : extra.synthetic) pool.push_back(std::move(s));
  }

  CrossValResult result;
  Rng plan_rng = rng.child(kFoldPlanStream);
  result.plan = make_folds(labels_of(pool), cfg.k_folds, plan_rng);

  for (int f = 0; f < cfg.k_folds; ++f) {
    std::vector<Sample> train, val;
    for (std::size_t i : result.plan.complement(f)) train.push_back(pool[i]);
    for (std::size_t i : result.plan.members(f)) val.push_back(pool[i]);

    FoldResult fr;
    fr.fold = f;
    fr.n_train = train.size();
    fr.n_val = val.size();
    for (const auto& s : train) fr.train_ids.push_back(s.id);
    try {
      Rng fold_rng = rng.child(kFoldStreamBase + static_cast<std::uint64_t>(f));
      FitOptions opts;
      opts.smote = !cfg.paper_mode;
      const auto fitted = fit_pipeline(train, val, cfg, fold_rng, opts);
      const auto images = normalized_images(val, fitted.norm);
      const auto truth = labels_of(val);
      const auto probs = fc_probabilities(fitted.net, images);
      const auto scores = svm_decisions(fitted.net, *fitted.head, images);
      std::vector<int> fc_pred(val.size()), svm_pred(val.size());
      for (std::size_t i = 0; i < val.size(); ++i) {
        fc_pred[i] = probs[i] >= 0.5 ? 1 : 0;
        svm_pred[i] = scores[i] >= 0.0 ? 1 : 0;
      }
      fr.fc = confusion(truth, fc_pred);
      fr.svm = confusion(truth, svm_pred);
      fr.fc_f1 = f1(fr.fc);
      fr.svm_f1 = f1(fr.svm);
      fr.best_epoch = fitted.best_epoch;
      if (cfg.paper_mode) {
        for (const auto& r : global_synthetics) {
          if (std::find(fr.train_ids.begin(), fr.train_ids.end(), r.id) != fr.train_ids.end()) {
            fr.synthetics.push_back(r);
          }
        }
      } else {
        fr.synthetics = fitted.synthetics;
      }
      if (on_fold) on_fold(fr, fitted);
    } catch (const Error& e) {
      throw Error(e.code(), "fold " + std::to_string(f) + ": " + e.what());
    }
    result.folds.push_back(std::move(fr));
  }
  double fc_sum = 0.0, svm_sum = 0.0;
  for (const auto& fr : result.folds) {
    fc_sum += fr.fc_f1;
    svm_sum += fr.svm_f1;
  }
  result.mean_fc_f1 = fc_sum / static_cast<double>(result.folds.size());
  result.mean_svm_f1 = svm_sum / static_cast<double>(result.folds.size());
  return result;
}

OcclusionReport occlusion_importance(const ProbabilityFn& probability, std::span<const MultiBandImage> images,
                                     std::span<const std::string> band_names) {
  if (images.empty()) throw ArgumentError("occlusion: no images");
  const std::size_t bands = images.front().channels();
  for (const auto& img : images) require_same_shape(images.front(), img, "occlusion");
  if (!band_names.empty() && band_names.size() != bands) {
    throw ArgumentError("occlusion: band_names has " + std::to_string(band_names.size()) + " entries for " +
                        std::to_string(bands) + " bands");
  }
  const std::size_t n = images.size();
  const auto p_orig = probability(images);

  OcclusionReport report;
  report.n_images = n;
  std::vector<double> sorted = p_orig;
  std::sort(sorted.begin(), sorted.end());
  report.mean_p_orig = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);

  for (std::size_t b = 0; b < bands; ++b) {
    std::vector<MultiBandImage> occluded(images.begin(), images.end());
    for (auto& img : occluded) {
      auto d = img.data();
      for (std::size_t i = b; i < d.size(); i += bands) d[i] = 0.0;
    }
    const auto p_occ = probability(occluded);
    std::vector<double> drops(n), assumed(n);
    for (std::size_t i = 0; i < n; ++i) {
      drops[i] = p_orig[i] - p_occ[i];
      assumed[i] = 1.0 - p_occ[i];
    }
    // Summing in sorted order makes the totals independent of image order.
    std::sort(drops.begin(), drops.end());
    std::sort(assumed.begin(), assumed.end());
    OcclusionEntry e;
    e.band = b;
    e.name = band_names.empty() ? "band" + std::to_string(b) : band_names[b];
    e.cumulative_drop = std::accumulate(drops.begin(), drops.end(), 0.0);
    e.mean_drop = e.cumulative_drop / static_cast<double>(n);
    e.cumulative_drop_assumed = std::accumulate(assumed.begin(), assumed.end(), 0.0);
    report.bands.push_back(e);
  }
  std::stable_sort(report.bands.begin(), report.bands.end(),
                   [](const OcclusionEntry& l, const OcclusionEntry& r) { return l.mean_drop > r.mean_drop; });
  for (std::size_t i = 0; i < report.bands.size(); ++i) report.bands[i].rank = i + 1;

  std::vector<MultiBandImage> blank;
  for (const auto& img : images) blank.emplace_back(img.height(), img.width(), img.channels(), 0.0);
  auto p_blank = probability(blank);
  std::sort(p_blank.begin(), p_blank.end());
  report.mean_p_all_occluded = std::accumulate(p_blank.begin(), p_blank.end(), 0.0) / static_cast<double>(n);
  const MultiBandImage zero(images.front().height(), images.front().width(), bands, 0.0);
  report.p_zero_input = probability(std::span(&zero, 1)).front();
  return report;
}

void write_occlusion_csv(const std::filesystem::path& path, const OcclusionReport& report) {
  std::ostringstream os;
  os << "# head=" << report.head << " logistic_scale=" << format_double(report.logistic_scale)
     << " images=" << report.n_images << " mean_p_orig=" << format_double(report.mean_p_orig)
     << " mean_p_all_occluded=" << format_double(report.mean_p_all_occluded)
     << " p_zero_input=" << format_double(report.p_zero_input) << "\n";
  os << "rank,band,name,mean_drop,cumulative_drop,cumulative_drop_assumed_one\n";
  for (const auto& e : report.bands) {
    os << e.rank << "," << e.band << "," << e.name << "," << format_double(e.mean_drop) << ","
       << format_double(e.cumulative_drop) << "," << format_double(e.cumulative_drop_assumed) << "\n";
  }
  write_text(path, os.str());
}

void write_occlusion_svg(const std::filesystem::path& path, const OcclusionReport& report) {
  constexpr int kRow = 22, kLabel = 120, kPlot = 360, kTop = 30;
  const int height = kTop + static_cast<int>(report.bands.size()) * kRow + 20;
  double lo = 0.0, hi = 0.0;
  for (const auto& e : report.bands) {
    lo = std::min(lo, e.mean_drop);
    hi = std::max(hi, e.mean_drop);
  }
  const double span = hi - lo > 0.0 ? hi - lo : 1.0;
  const double zero_x = kLabel + kPlot * (-lo / span);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kLabel + kPlot + 90 << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"10\" y=\"18\">Mean landslide probability drop per occluded band (" << xml_escape(report.head)
     << " head, " << report.n_images << " images)</text>\n";
  for (std::size_t i = 0; i < report.bands.size(); ++i) {
    const auto& e = report.bands[i];
    const int y = kTop + static_cast<int>(i) * kRow;
    const double x_end = kLabel + kPlot * ((e.mean_drop - lo) / span);
    const double x = std::min(zero_x, x_end);
    const double w = std::abs(x_end - zero_x);
    os << "<text x=\"" << kLabel - 6 << "\" y=\"" << y + 14 << "\" text-anchor=\"end\">" << xml_escape(e.name)
       << "</text>";
    os << "<rect x=\"" << x << "\" y=\"" << y + 3 << "\" width=\"" << w << "\" height=\"" << kRow - 6
       << "\" fill=\"" << (e.mean_drop >= 0.0 ? "#3b6ea8" : "#b5523b") << "\"/>";
    os << "<text x=\"" << std::max(x_end, zero_x) + 4 << "\" y=\"" << y + 14 << "\">" << format_double(e.mean_drop)
       << "</text>\n";
  }
  os << "<line x1=\"" << zero_x << "\" y1=\"" << kTop << "\" x2=\"" << zero_x << "\" y2=\"" << height - 20
     << "\" stroke=\"#333\"/>\n</svg>\n";
  write_text(path, os.str());
}

void write_folds_csv(const std::filesystem::path& path, const CrossValResult& result) {
  std::ostringstream os;
  os << "fold,n_train,n_val,n_synthetic,best_epoch,fc_tp,fc_fp,fc_fn,fc_tn,fc_f1,svm_tp,svm_fp,svm_fn,svm_tn,svm_f1\n";
  for (const auto& f : result.folds) {
    os << f.fold << "," << f.n_train << "," << f.n_val << "," << f.synthetics.size() << "," << f.best_epoch << ","
       << f.fc.tp << "," << f.fc.fp << "," << f.fc.fn << "," << f.fc.tn << "," << format_double(f.fc_f1) << ","
       << f.svm.tp << "," << f.svm.fp << "," << f.svm.fn << "," << f.svm.tn << "," << format_double(f.svm_f1)
       << "\n";
  }
  os << "mean,,,,,,,,," << format_double(result.mean_fc_f1) << ",,,,," << format_double(result.mean_svm_f1) << "\n";
  write_text(path, os.str());
}

void write_epoch_log_csv(const std::filesystem::path& path, std::span<const model::EpochMetrics> log) {
  std::ostringstream os;
  os << "epoch,lr,train_loss,train_f1,val_f1\n";
  for (const auto& m : log) {
    os << m.epoch << "," << format_double(m.lr) << "," << format_double(m.train_loss) << ","
       << format_double(m.train_f1) << "," << (m.val_f1 ? format_double(*m.val_f1) : "") << "\n";
  }
  write_text(path, os.str());
}

void write_synthetics_csv(const std::filesystem::path& path, std::span<const SyntheticRecord> records) {
  std::ostringstream os;
  os << "id,anchor_id,neighbor_id,lambda\n";
  for (const auto& r : records) {
    os << r.id << "," << r.anchor_id << "," << r.neighbor_id << "," << format_double(r.lambda) << "\n";
  }
  write_text(path, os.str());
}

void export_embeddings(const std::filesystem::path& path, std::span<const Sample> samples,
                       std::span<const std::vector<double>> embeddings) {
  if (samples.size() != embeddings.size()) throw DimensionError("export_embeddings: row count mismatch");
  const std::size_t d = embeddings.empty() ? 0 : embeddings.front().size();
  std::ostringstream os;
  os << "id,label";
  for (std::size_t j = 0; j < d; ++j) os << ",e_" << j;
  os << "\n";
  char buf[32];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    os << samples[i].id << "," << (samples[i].label >= 0 ? std::to_string(samples[i].label) : "");
    for (double v : embeddings[i]) {
      std::snprintf(buf, sizeof buf, "%.9g", v);
      os << "," << buf;
    }
    os << "\n";
  }
  try {
    write_text(path, os.str());
  } catch (const IoError& e) {
    throw IoError("export_embeddings: " + std::string(e.what()));
  }
}

}  // namespace landslide::eval
