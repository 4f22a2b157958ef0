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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "landslide/error.hpp"
#include "landslide/eval.hpp"
#include "landslide/mbt.hpp"
#include "landslide/synth.hpp"

using namespace landslide;
using namespace landslide::eval;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("landslide_test_eval_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<Sample> synth_samples(const SynthOptions& o) {
  std::vector<Sample> out;
  for (auto& s : make_synth(o)) out.push_back({s.id, std::move(s.image), s.label, -1});
  return out;
}

RunConfig small_config(int size, int epochs) {
  RunConfig cfg;
  cfg.image_size = size;
  cfg.epochs = epochs;
  cfg.batch_size = 8;
  cfg.base_lr = 3e-3;
  cfg.k_folds = 3;
  cfg.model.conv_channels = {8, 8};
  cfg.model.embedding_dim = 8;
  return cfg;
}

}  // namespace

TEST_CASE("f1 matches the harmonic mean of precision and recall") {
  CHECK(f1({5, 0, 0, 0}) == 1.0);
  CHECK(f1({0, 0, 3, 4}) == 0.0);
  CHECK(f1({8, 2, 2, 0}) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(f1({0, 0, 0, 7}) == 0.0);
  for (std::uint64_t tp = 0; tp <= 5; ++tp) {
    for (std::uint64_t fp = 0; fp <= 5; ++fp) {
      for (std::uint64_t fn = 0; fn <= 5; ++fn) {
        for (std::uint64_t tn = 0; tn <= 5; ++tn) {
          double expected = 0.0;
          if (tp > 0) {
            const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
            const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
            expected = 2.0 * precision * recall / (precision + recall);
          }
          const double got = f1({tp, fp, fn, tn});
          CHECK(std::abs(got - expected) <= 1e-15);
          CHECK(got >= 0.0);
          CHECK(got <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("confusion counts add up to the number of samples") {
  const std::vector<int> truth{1, 1, 0, 0, 1, 0};
  const std::vector<int> pred{1, 0, 0, 1, 1, 0};
  const auto c = confusion(truth, pred);
  CHECK(c == ConfusionCounts{2, 1, 1, 2});
  CHECK(c.total() == truth.size());
  CHECK_THROWS_AS(confusion(truth, std::vector<int>{1}), DimensionError);
}

TEST_CASE("make_folds: exact stratification on 5 per class") {
  const std::vector<int> labels{0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  Rng rng(3);
  const auto plan = make_folds(labels, 5, rng);
  for (int f = 0; f < 5; ++f) {
    const auto m = plan.members(f);
    REQUIRE(m.size() == 2);
    CHECK(labels[m[0]] + labels[m[1]] == 1);
  }
}

TEST_CASE("make_folds: partition, stratification bound and determinism") {
  Rng gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int k = 2 + static_cast<int>(gen.below(5));
    const std::size_t n = 40 + gen.below(60);
    std::vector<int> labels(n);
    for (auto& l : labels) l = gen.uniform() < 0.25 ? 1 : 0;
    for (int c = 0; c < 2; ++c) {
      for (int i = 0; i < k; ++i) labels[static_cast<std::size_t>(c * k + i)] = c;
    }
    Rng a(trial), b(trial);
    const auto plan = make_folds(labels, k, a);
    CHECK(plan.assignment == make_folds(labels, k, b).assignment);

    std::vector<int> seen(n, 0);
    for (int f = 0; f < k; ++f) {
      const auto m = plan.members(f);
      const auto comp = plan.complement(f);
      CHECK(m.size() + comp.size() == n);
      for (auto i : m) ++seen[i];
      std::set<std::size_t> ms(m.begin(), m.end());
      for (auto i : comp) CHECK(ms.count(i) == 0);
      for (int c = 0; c < 2; ++c) {
        const double global = static_cast<double>(std::count(labels.begin(), labels.end(), c));
        const double in_fold = static_cast<double>(std::count_if(m.begin(), m.end(), [&](std::size_t i) {
          return labels[i] == c;
        }));
        CHECK(std::abs(in_fold - global * static_cast<double>(m.size()) / static_cast<double>(n)) <= 1.0 + 1e-9);
      }
    }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
  }
}

TEST_CASE("make_folds: errors") {
  Rng rng(1);
  const std::vector<int> labels{0, 0, 0, 1, 1};
  CHECK_THROWS_AS(make_folds(labels, 3, rng), InsufficientDataError);
  CHECK_THROWS_AS(make_folds(labels, 1, rng), ArgumentError);
}

TEST_CASE("cross_validate: minimal k=2 on four samples") {
  SynthOptions o;
  o.count = 4;
  o.size = 8;
  o.bands = 3;
  o.imbalance = 1.0;
  o.signal_bands = {0};
  o.dead_band = std::nullopt;
  auto samples = synth_samples(o);
  auto cfg = small_config(8, 1);
  cfg.k_folds = 2;
  cfg.batch_size = 2;
  cfg.smote.enabled = false;
  Rng rng(5);
  const auto r = cross_validate(samples, cfg, rng);
  REQUIRE(r.folds.size() == 2);
  for (const auto& f : r.folds) {
    CHECK(f.n_val == 2);
    CHECK(f.n_train == 2);
    CHECK(f.fc.total() == 2);
    CHECK(f.svm.total() == 2);
  }
}

TEST_CASE("cross_validate: separable data, no leakage, arithmetic mean") {
  SynthOptions o;
  o.count = 60;
  o.size = 12;
  o.bands = 4;
  o.imbalance = 2.0;
  o.signal_bands = {1};
  o.dead_band = 3;
  o.amplitude = 6.0;
  o.noise = 0.2;
  const auto samples = synth_samples(o);
  auto cfg = small_config(12, 30);
  // At C = 0.1 the head underfits this tiny training set (40 images).
  cfg.svm.c = 1.0;
  Rng rng(9);
  std::size_t callbacks = 0;
  const auto r = cross_validate(samples, cfg, rng, [&](const FoldResult& f, const FittedPipeline& fp) {
    ++callbacks;
    CHECK(fp.head.has_value());
    CHECK(fp.best_epoch == f.best_epoch);
  });
  CHECK(callbacks == 3);
  REQUIRE(r.folds.size() == 3);

  double fc_sum = 0.0, svm_sum = 0.0;
  for (const auto& f : r.folds) {
    fc_sum += f.fc_f1;
    svm_sum += f.svm_f1;
    CHECK(f.fc_f1 == f1(f.fc));
    const std::set<std::string> train(f.train_ids.begin(), f.train_ids.end());
    for (auto i : r.plan.members(f.fold)) CHECK(train.count(samples[i].id) == 0);
    CHECK(!f.synthetics.empty());
    for (const auto& s : f.synthetics) {
      CHECK(train.count(s.anchor_id) == 1);
      CHECK(train.count(s.neighbor_id) == 1);
    }
  }
  CHECK(std::abs(r.mean_fc_f1 - fc_sum / 3.0) <= 1e-12);
  CHECK(std::abs(r.mean_svm_f1 - svm_sum / 3.0) <= 1e-12);
  CHECK(r.mean_fc_f1 >= 0.95);
  CHECK(r.mean_svm_f1 >= 0.95);

  Rng again(9);
  const auto r2 = cross_validate(samples, cfg, again);
  for (std::size_t f = 0; f < r.folds.size(); ++f) {
    CHECK(r.folds[f].fc == r2.folds[f].fc);
    CHECK(r.folds[f].svm == r2.folds[f].svm);
  }
}

TEST_CASE("cross_validate: paper mode oversamples before splitting") {
  SynthOptions o;
  o.count = 30;
  o.size = 8;
  o.bands = 3;
  o.imbalance = 2.0;
  o.signal_bands = {0};
  o.dead_band = std::nullopt;
  const auto samples = synth_samples(o);
  auto cfg = small_config(8, 1);
  cfg.paper_mode = true;
  Rng rng(2);
  const auto r = cross_validate(samples, cfg, rng);
  std::size_t total = 0;
  for (const auto& f : r.folds) {
    total += f.n_val;
    // Only the global synthetics that landed in this fold's training split.
    const std::set<std::string> train(f.train_ids.begin(), f.train_ids.end());
    for (const auto& s : f.synthetics) CHECK(train.count(s.id) == 1);
  }
  CHECK(total == r.plan.assignment.size());
  CHECK(total > samples.size());
}

TEST_CASE("cross_validate: errors carry the fold index") {
  auto cfg = small_config(8, 1);
  Rng rng(1);
  CHECK_THROWS_AS(cross_validate(std::vector<Sample>{}, cfg, rng), EmptyDatasetError);
}

namespace {

// p = sigmoid(mean of band 0 - 0.5 * mean of band 1); other bands ignored.
std::vector<double> band_probability(std::span<const MultiBandImage> images) {
  std::vector<double> p;
  for (const auto& img : images) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t y = 0; y < img.height(); ++y) {
      for (std::size_t x = 0; x < img.width(); ++x) {
        m0 += img.at(y, x, 0);
        m1 += img.at(y, x, 1);
      }
    }
    const double z = (m0 - 0.5 * m1) / static_cast<double>(img.pixels());
    p.push_back(1.0 / (1.0 + std::exp(-z)));
  }
  return p;
}

std::vector<MultiBandImage> positive_images(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<MultiBandImage> out;
  for (std::size_t i = 0; i < n; ++i) {
    MultiBandImage img(4, 4, 4);
    for (std::size_t y = 0; y < 4; ++y) {
      for (std::size_t x = 0; x < 4; ++x) {
        img.at(y, x, 0) = 2.0 + rng.normal();
        img.at(y, x, 1) = -1.0 + 0.1 * rng.normal();
        img.at(y, x, 2) = rng.normal();
        img.at(y, x, 3) = rng.normal();
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace

TEST_CASE("occlusion: constructed signal band ranks first, ignored bands drop exactly 0") {
  const auto images = positive_images(20, 4);
  const auto r = occlusion_importance(band_probability, images);
  REQUIRE(r.bands.size() == 4);
  CHECK(r.bands[0].band == 0);
  CHECK(r.bands[0].rank == 1);
  CHECK(r.bands[0].mean_drop > 0.0);
  // Band 1 has a negative weight on a negative mean, so zeroing it also
  // lowers p. Bands 2 and 3 tie at 0 and keep index order.
  CHECK(r.bands[1].band == 1);
  CHECK(r.bands[1].mean_drop > 0.0);
  CHECK(r.bands[2].band == 2);
  CHECK(r.bands[3].band == 3);
  for (const auto& e : r.bands) {
    if (e.band >= 2) {
      CHECK(e.cumulative_drop == 0.0);
      CHECK(e.mean_drop == 0.0);
    }
  }
  CHECK(r.n_images == 20);
  std::vector<std::size_t> ranks;
  for (const auto& e : r.bands) ranks.push_back(e.rank);
  std::sort(ranks.begin(), ranks.end());
  CHECK(ranks == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(r.p_zero_input == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(r.mean_p_all_occluded == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("occlusion: the assumed-one convention and the mean drop agree with a direct sum") {
  const auto images = positive_images(7, 8);
  const auto r = occlusion_importance(band_probability, images);
  const auto p_orig = band_probability(images);
  for (const auto& e : r.bands) {
    double drop = 0.0, assumed = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      auto occluded = images[i];
      for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t x = 0; x < 4; ++x) occluded.at(y, x, e.band) = 0.0;
      }
      const double p = band_probability(std::span(&occluded, 1)).front();
      drop += p_orig[i] - p;
      assumed += 1.0 - p;
    }
    CHECK(e.cumulative_drop == doctest::Approx(drop).epsilon(1e-12));
    CHECK(e.cumulative_drop_assumed == doctest::Approx(assumed).epsilon(1e-12));
    CHECK(e.mean_drop == doctest::Approx(drop / 7.0).epsilon(1e-12));
  }
}

TEST_CASE("occlusion: report is invariant to image order") {
  auto images = positive_images(15, 6);
  const auto a = occlusion_importance(band_probability, images);
  std::reverse(images.begin(), images.end());
  std::rotate(images.begin(), images.begin() + 4, images.end());
  const auto b = occlusion_importance(band_probability, images);
  for (std::size_t i = 0; i < a.bands.size(); ++i) {
    CHECK(a.bands[i].band == b.bands[i].band);
    CHECK(a.bands[i].cumulative_drop == b.bands[i].cumulative_drop);
  }
  CHECK(a.mean_p_orig == b.mean_p_orig);
}

TEST_CASE("occlusion: a CNN band with zero input weights drops exactly 0") {
  model::CnnConfig c;
  c.input_channels = 3;
  c.input_height = 6;
  c.input_width = 6;
  c.conv_channels = {4};
  c.embedding_dim = 4;
  Rng rng(12);
  auto net = model::CompactCnn::initialized(c, rng);
  // Weight layout k x k x in x out: zero every tap reading band 2.
  auto& w = net.conv_weight(0);
  for (std::size_t t = 0; t < 9; ++t) {
    for (std::size_t o = 0; o < 4; ++o) w.values[(t * 3 + 2) * 4 + o] = 0.0;
  }
  std::vector<MultiBandImage> images;
  for (int i = 0; i < 5; ++i) {
    MultiBandImage img(6, 6, 3);
    for (auto& v : img.data()) v = rng.normal();
    images.push_back(std::move(img));
  }
  const std::vector<std::string> names{"red", "nir", "vv"};
  const auto r = occlusion_importance([&](auto imgs) { return fc_probabilities(net, imgs); }, images, names);
  for (const auto& e : r.bands) {
    CHECK(e.name == names[e.band]);
    if (e.band == 2) CHECK(e.cumulative_drop == 0.0);
  }
  std::vector<MultiBandImage> zeros(1, MultiBandImage(6, 6, 3));
  CHECK(r.p_zero_input == fc_probabilities(net, zeros).front());
  CHECK(r.mean_p_all_occluded == r.p_zero_input);
}

TEST_CASE("occlusion: argument errors") {
  CHECK_THROWS_AS(occlusion_importance(band_probability, std::vector<MultiBandImage>{}), ArgumentError);
  const auto images = positive_images(2, 1);
  const std::vector<std::string> names{"a"};
  CHECK_THROWS_AS(occlusion_importance(band_probability, images, names), ArgumentError);
}

TEST_CASE("report writers: occlusion CSV and SVG") {
  const auto dir = temp_dir("occ");
  const auto images = positive_images(3, 2);
  auto r = occlusion_importance(band_probability, images);
  r.head = "fc";
  write_occlusion_csv(dir / "o.csv", r);
  write_occlusion_svg(dir / "o.svg", r);
  const auto csv = slurp(dir / "o.csv");
  CHECK(csv.rfind("# head=fc", 0) == 0);
  CHECK(csv.find("rank,band,name,mean_drop,cumulative_drop,cumulative_drop_assumed_one\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 4);
  const auto svg = slurp(dir / "o.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("band0") != std::string::npos);
}

TEST_CASE("export_embeddings: header, row count and byte-identical re-export") {
  const auto dir = temp_dir("emb");
  std::vector<Sample> samples;
  std::vector<std::vector<double>> emb;
  for (int i = 0; i < 5; ++i) {
    samples.push_back({"s" + std::to_string(i), MultiBandImage(1, 1, 1), i % 2, -1});
    emb.push_back({0.1 * i, -1.0 / 3.0, 1e-20, 7.0});
  }
  export_embeddings(dir / "a.csv", samples, emb);
  export_embeddings(dir / "b.csv", samples, emb);
  const auto a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 6);
  CHECK(a.rfind("id,label,e_0,e_1,e_2,e_3\n", 0) == 0);
  CHECK(a.find("s1,1,") != std::string::npos);
  CHECK_THROWS_AS(export_embeddings(dir / "c.csv", samples, std::span(emb).first(2)), DimensionError);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.0, 1.0, 0.1, -1.0 / 3.0, 1e-300, 123456789.125, 0.8938}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}
