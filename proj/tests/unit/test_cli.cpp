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
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "cli/commands.hpp"
#include "json.hpp"
#include "landslide/config.hpp"
#include "landslide/dataset.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"
#include "landslide/pipeline.hpp"
#include "landslide/synth.hpp"

using namespace landslide;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("landslide_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename E>
std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  return "<no exception>";
}

std::vector<std::string> run(std::string_view name, const json& request) {
  std::vector<std::string> lines;
  cli::run_command(name, request.dump(), [&](cli::Channel ch, const std::string& line) {
    if (ch == cli::Channel::kResult) lines.push_back(line);
  });
  return lines;
}

// Writes `n` images of `size` x `size` x `bands` plus a manifest.
fs::path write_dataset(const fs::path& dir, std::size_t n_pos, std::size_t n_neg, std::size_t size,
                       std::size_t bands, std::uint64_t seed) {
  Rng rng(seed);
  std::ostringstream m;
  m << "id,path,label\n";
  for (std::size_t i = 0; i < n_pos + n_neg; ++i) {
    const int label = i < n_pos ? 1 : 0;
    MultiBandImage img(size, size, bands);
    for (auto& v : img.data()) v = static_cast<float>(rng.normal() + 2.0 * label);
    const std::string id = "im" + std::to_string(i);
    write_mbt(dir / "img" / (id + ".mbt"), img);
    m << id << ",img/" << id << ".mbt," << label << "\n";
  }
  write(dir / "manifest.csv", m.str());
  return dir / "manifest.csv";
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST_CASE("config: defaults match the documented training protocol") {
  const RunConfig c;
  CHECK(c.image_size == 256);
  CHECK(c.epochs == 50);
  CHECK(c.batch_size == 36);
  CHECK(c.base_lr == 0.0003);
  CHECK(c.k_folds == 5);
  CHECK(c.svm.c == 0.1);
  CHECK(!c.svm.gamma.has_value());
  CHECK(c.smote.k_neighbors == 5);
  CHECK(c.smote.clip_lo == 0.1);
  CHECK(c.smote.clip_hi == 0.9);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config: JSON round trip and overrides win over the file") {
  RunConfig c;
  c.seed = 7;
  c.bands = {0, 2, 5};
  c.band_names = {"red", "nir", "vv"};
  c.smote.n_syn = 6;
  c.svm.gamma = 0.25;
  c.schedule.kind = model::ScheduleKind::kStep;
  const auto text = config_to_json(c);
  const auto back = parse_config(text);
  CHECK(config_to_json(back) == text);
  CHECK(back.bands == c.bands);
  CHECK(back.smote.n_syn == std::optional<std::size_t>(6));
  CHECK(back.svm.gamma == std::optional<double>(0.25));

  const auto dir = temp_dir("cfg");
  write(dir / "run.json", R"({"epochs": 3, "svm": {"c": 1.0}})");
  const auto r = resolve_config(dir / "run.json", R"({"svm": {"c": 0.5}, "seed": 9})");
  CHECK(r.epochs == 3);
  CHECK(r.svm.c == 0.5);
  CHECK(r.seed == 9);
  CHECK(r.batch_size == 36);
}

TEST_CASE("config: unknown keys, bad JSON and bad fields are diagnosed") {
  CHECK(message_of<ConfigError>([] { parse_config(R"({"epochz": 3})", "run.json"); }) ==
        "run.json: unknown key 'epochz'");
  CHECK(message_of<ConfigError>([] { parse_config(R"({"svm": {"cc": 1}})", "run.json"); }) ==
        "run.json: unknown key 'svm.cc'");
  CHECK(message_of<ConfigError>([] { parse_config("{\n  \"epochs\": 3,\n  oops\n}", "run.json"); })
            .rfind("run.json:3:", 0) == 0);
  CHECK(message_of<ConfigError>([] { parse_config(R"({"epochs": "ten"})", "run.json"); }) ==
        "run.json: field 'epochs': expected an integer");
  CHECK(message_of<ConfigError>([] { parse_config(R"({"bands": [1, -2]})", "run.json"); }) ==
        "run.json: field 'bands[1]': expected a non-negative integer");
  CHECK_THROWS_AS(parse_config(R"({"batch_size": 0})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"smote": {"n_syn": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"svm": {"gamma": "fast"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"normalization": "minmax"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"([1, 2])"), ConfigError);
  CHECK_THROWS_AS(resolve_config(fs::path("/nonexistent/run.json")), Error);
}

TEST_CASE("config: automatic synthetic count balances the classes") {
  RunConfig c;
  CHECK(c.smote_config(100, 700).n_syn == 6);
  CHECK(c.smote_config(44, 356).n_syn == 7);
  CHECK(c.smote_config(50, 50).n_syn == 1);
  c.smote.n_syn = 4;
  CHECK(c.smote_config(100, 700).n_syn == 4);
}

// ---------------------------------------------------------------------------
// Manifests

TEST_CASE("manifest: round trip with folds and provenance") {
  const auto dir = temp_dir("manifest");
  write_mbt(dir / "a.mbt", MultiBandImage(2, 2, 1, 1.0));
  DatasetManifest m;
  m.base_dir = dir;
  m.rows.push_back({"a", "a.mbt", 1, 0, std::nullopt, std::nullopt, std::nullopt});
  m.rows.push_back({"s", "a.mbt", 1, 1, std::string("a"), std::string("a"), 0.1 + 0.2});
  write_manifest(dir / "m.csv", m);
  const auto back = read_manifest(dir / "m.csv");
  REQUIRE(back.rows.size() == 2);
  CHECK(back.has_folds());
  CHECK(back.has_provenance());
  CHECK(back.rows[1].lambda == std::optional<double>(0.1 + 0.2));
  CHECK(back.rows[1].anchor_id == std::optional<std::string>("a"));
  CHECK(back.rows[0].fold == std::optional<int>(0));
  write_manifest(dir / "m2.csv", back);
  CHECK(slurp(dir / "m.csv") == slurp(dir / "m2.csv"));
}

TEST_CASE("manifest: errors carry the line number") {
  const auto dir = temp_dir("manifest_err");
  write_mbt(dir / "a.mbt", MultiBandImage(2, 2, 1));
  write(dir / "dup.csv", "id,path,label\na,a.mbt,0\na,a.mbt,1\n");
  CHECK(message_of<FormatError>([&] { read_manifest(dir / "dup.csv"); }).find("dup.csv:3: duplicate id 'a'") !=
        std::string::npos);
  write(dir / "label.csv", "id,path,label\na,a.mbt,2\n");
  CHECK(message_of<FormatError>([&] { read_manifest(dir / "label.csv"); }).find(":2: label must be 0 or 1") !=
        std::string::npos);
  write(dir / "missing.csv", "id,path,label\na,b.mbt,0\n");
  CHECK_THROWS_AS(read_manifest(dir / "missing.csv"), IoError);
  write(dir / "nolabel.csv", "id,path\na,a.mbt\n");
  CHECK_THROWS_AS(read_manifest(dir / "nolabel.csv"), FormatError);
  CHECK(read_manifest(dir / "nolabel.csv", true).rows.size() == 1);
  write(dir / "empty.csv", "");
  CHECK_THROWS_AS(read_manifest(dir / "empty.csv"), EmptyDatasetError);
  CHECK_THROWS_AS(read_manifest(dir / "none.csv"), IoError);
}

TEST_CASE("load_samples: band selection, resize and shape checks") {
  const auto dir = temp_dir("load");
  MultiBandImage img(4, 4, 3);
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t b = 0; b < 3; ++b) img.at(y, x, b) = static_cast<double>(10 * b);
    }
  }
  write_mbt(dir / "a.mbt", img);
  write_mbt(dir / "b.mbt", MultiBandImage(5, 5, 3));
  write(dir / "ok.csv", "id,path,label\na,a.mbt,1\n");
  const std::vector<std::size_t> bands{2, 0};
  const auto s = load_samples(read_manifest(dir / "ok.csv"), bands, 2);
  REQUIRE(s.size() == 1);
  CHECK(s[0].image.height() == 2);
  CHECK(s[0].image.channels() == 2);
  CHECK(s[0].image.at(1, 1, 0) == 20.0);
  CHECK(s[0].image.at(1, 1, 1) == 0.0);
  CHECK(s[0].label == 1);
  const std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(load_samples(read_manifest(dir / "ok.csv"), bad, 0), DimensionError);
  write(dir / "mixed.csv", "id,path,label\na,a.mbt,1\nb,b.mbt,0\n");
  CHECK_THROWS_AS(load_samples(read_manifest(dir / "mixed.csv"), {}, 0), DimensionError);
  CHECK(load_samples(read_manifest(dir / "mixed.csv"), {}, 4).size() == 2);
}

// ---------------------------------------------------------------------------
// Synthetic benchmark generator

TEST_CASE("make_synth: class counts, dead band and determinism") {
  SynthOptions o;
  o.count = 90;
  o.size = 16;
  const auto a = make_synth(o);
  const auto b = make_synth(o);
  REQUIRE(a.size() == 90);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pos += static_cast<std::size_t>(a[i].label);
    CHECK(a[i].image == b[i].image);
    CHECK(a[i].image.channels() == 12);
    for (std::size_t y = 0; y < 16; ++y) {
      for (std::size_t x = 0; x < 16; ++x) CHECK(a[i].image.at(y, x, 10) == 0.0);
    }
  }
  CHECK(pos == 10);
  o.seed = 43;
  CHECK(make_synth(o)[0].image != a[0].image);
  o.signal_bands = {10};
  CHECK_THROWS_AS(make_synth(o), ArgumentError);
  o.signal_bands = {12};
  CHECK_THROWS_AS(make_synth(o), ArgumentError);
}

TEST_CASE("make_synth: positives carry more energy in the signal bands") {
  SynthOptions o;
  o.count = 60;
  o.size = 16;
  o.imbalance = 1.0;
  double pos = 0.0, neg = 0.0;
  for (const auto& s : make_synth(o)) {
    double e = 0.0;
    for (std::size_t b : o.signal_bands) {
      for (std::size_t y = 0; y < 16; ++y) {
        for (std::size_t x = 0; x < 16; ++x) e += s.image.at(y, x, b) - s.image.at(y, x, 0);
      }
    }
    (s.label == 1 ? pos : neg) += e / 30.0;
  }
  CHECK(pos > neg + 100.0);
}

// ---------------------------------------------------------------------------
// Pipeline pieces

TEST_CASE("preprocess metadata round trip and validation") {
  Preprocess p;
  p.bands = {1, 3};
  p.band_names = {"a", "b"};
  p.image_size = 32;
  p.norm.mode = NormalizationMode::kRobust;
  p.norm.center = {0.1, -2.0};
  p.norm.scale = {1.0 / 3.0, 4.0};
  const auto back = preprocess_from_json(preprocess_to_json(p));
  CHECK(back.bands == p.bands);
  CHECK(back.band_names == p.band_names);
  CHECK(back.image_size == 32);
  CHECK(back.norm.mode == NormalizationMode::kRobust);
  CHECK(back.norm.center == p.norm.center);
  CHECK(back.norm.scale == p.norm.scale);
  CHECK_THROWS_AS(preprocess_from_json("{}"), FormatError);
  CHECK_THROWS_AS(preprocess_from_json("not json"), FormatError);
}

TEST_CASE("oversample: 100 minority and 700 majority with n_syn 6 balance to 700/700") {
  std::vector<Sample> samples;
  Rng rng(4);
  for (int i = 0; i < 800; ++i) {
    MultiBandImage img(8, 8, 1);
    for (auto& v : img.data()) v = rng.normal();
    samples.push_back({"x" + std::to_string(i), std::move(img), i < 100 ? 1 : 0, -1});
  }
  RunConfig cfg;
  cfg.smote.n_syn = 6;
  cfg.smote.max_candidates = 30;
  Rng a(1), b(1);
  const auto r = oversample(samples, cfg, a);
  CHECK(r.minority_label == 1);
  CHECK(r.synthetic.size() == 600);
  CHECK(100 + r.synthetic.size() == 700);
  std::set<std::string> minority_ids;
  for (int i = 0; i < 100; ++i) minority_ids.insert("x" + std::to_string(i));
  for (const auto& rec : r.records) {
    CHECK(minority_ids.count(rec.anchor_id) == 1);
    CHECK(minority_ids.count(rec.neighbor_id) == 1);
    CHECK(rec.anchor_id != rec.neighbor_id);
  }
  const auto again = oversample(samples, cfg, b);
  for (std::size_t i = 0; i < r.synthetic.size(); ++i) CHECK(r.synthetic[i].image == again.synthetic[i].image);
}

TEST_CASE("fit_pipeline: epochs 0 keeps the initialized network and fits a head") {
  const auto dir = temp_dir("fit0");
  const auto m = read_manifest(write_dataset(dir, 6, 6, 8, 2, 1));
  const auto samples = load_samples(m, {}, 0);
  RunConfig cfg;
  cfg.image_size = 8;
  cfg.epochs = 0;
  Rng a(3), b(3);
  const auto f = fit_pipeline(samples, {}, cfg, a);
  CHECK(f.log.empty());
  CHECK(f.head.has_value());
  const auto g = fit_pipeline(samples, {}, cfg, b);
  CHECK(model::encode_checkpoint({f.net, "{}"}) == model::encode_checkpoint({g.net, "{}"}));
  CHECK(svm::encode_model(*f.head) == svm::encode_model(*g.head));
  CHECK_THROWS_AS(fit_pipeline(std::vector<Sample>{}, {}, cfg, a), EmptyDatasetError);
}

// ---------------------------------------------------------------------------
// Commands, run in-process

TEST_CASE("commands: request validation") {
  CHECK_THROWS_AS(run("bogus", json::object()), ArgumentError);
  CHECK_THROWS_AS(run("train", json{{"manifest", "m.csv"}, {"out_dir", "x"}, {"colour", 1}}), ArgumentError);
  CHECK_THROWS_AS(run("train", json{{"out_dir", "x"}}), ArgumentError);
  CHECK_THROWS_AS(cli::run_command("train", "{not json", [](auto, const auto&) {}), ArgumentError);
  CHECK_THROWS_AS(run("make-synth", json{{"out_dir", "x"}, {"count", -3}}), ArgumentError);
  CHECK(std::string(cli::command_names()).find("occlusion") != std::string::npos);
}

TEST_CASE("commands: train, fit-svm, evaluate and predict on a toy manifest") {
  const auto dir = temp_dir("flow");
  const auto manifest = write_dataset(dir / "data", 10, 10, 8, 3, 2).string();
  const json overrides{{"image_size", 8}, {"epochs", 15}, {"batch_size", 4}, {"base_lr", 0.003}};

  auto lines = run("train", {{"manifest", manifest}, {"out_dir", (dir / "run").string()}, {"overrides", overrides}});
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("event=train") == 0);
  CHECK(fs::exists(dir / "run" / "model.cnn"));
  const auto metrics = slurp(dir / "run" / "metrics.csv");
  CHECK(metrics.rfind("epoch,lr,train_loss,train_f1,val_f1\n", 0) == 0);
  CHECK(std::count(metrics.begin(), metrics.end(), '\n') == 16);
  CHECK(parse_config(slurp(dir / "run" / "config.json")).epochs == 15);

  const auto ckpt = (dir / "run" / "model.cnn").string();
  lines = run("fit-svm", {{"checkpoint", ckpt}, {"manifest", manifest}, {"out", (dir / "h.svm").string()}});
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("c=0.1 ") != std::string::npos);
  CHECK(svm::load_model(dir / "h.svm").c == 0.1);

  lines = run("fit-svm", {{"checkpoint", ckpt},
                          {"manifest", manifest},
                          {"out", (dir / "sweep").string()},
                          {"c", {1.0, 0.75, 0.5, 0.1}},
                          {"eval_manifest", manifest}});
  CHECK(lines.size() == 4);
  for (const char* c : {"1", "0.75", "0.5", "0.1"}) {
    CHECK(svm::load_model(dir / "sweep" / (std::string("svm_c") + c + ".svm")).c == std::stod(c));
  }
  const auto sweep = slurp(dir / "sweep" / "sweep.csv");
  CHECK(std::count(sweep.begin(), sweep.end(), '\n') == 5);

  lines = run("evaluate", {{"checkpoint", ckpt}, {"manifest", manifest}, {"svm", (dir / "h.svm").string()},
                           {"embeddings", (dir / "emb.csv").string()}});
  REQUIRE(lines.size() == 2);
  CHECK(lines[0].find("head=fc tp=") == 0);
  CHECK(lines[1].find("head=svm tp=") == 0);
  const auto emb = slurp(dir / "emb.csv");
  CHECK(std::count(emb.begin(), emb.end(), '\n') == 21);

  // A perfectly fitted toy model scores F1 1 on its own predictions.
  run("predict", {{"checkpoint", ckpt}, {"manifest", manifest}, {"out", (dir / "pred.csv").string()}});
  const auto pred = slurp(dir / "pred.csv");
  CHECK(pred.rfind("id,label\n", 0) == 0);
  CHECK(std::count(pred.begin(), pred.end(), '\n') == 21);
  CHECK(lines[0].find("f1=1") != std::string::npos);
  std::istringstream rows(pred);
  std::string row;
  std::getline(rows, row);
  std::size_t correct = 0;
  while (std::getline(rows, row)) {
    const int id = std::stoi(row.substr(2, row.find(',') - 2));
    const int label = row.back() - '0';
    correct += static_cast<std::size_t>(label == (id < 10 ? 1 : 0));
  }
  CHECK(correct == 20);
}

TEST_CASE("commands: data errors") {
  const auto dir = temp_dir("errs");
  const auto manifest = write_dataset(dir / "data", 4, 4, 8, 2, 3).string();
  write(dir / "empty.csv", "id,path,label\n");
  run("train", {{"manifest", manifest},
                {"out_dir", (dir / "run").string()},
                {"overrides", {{"image_size", 8}, {"epochs", 0}}}});
  const auto ckpt = (dir / "run" / "model.cnn").string();
  CHECK(slurp(dir / "run" / "metrics.csv") == "epoch,lr,train_loss,train_f1,val_f1\n");
  CHECK_THROWS_AS(run("evaluate", {{"checkpoint", ckpt}, {"manifest", (dir / "empty.csv").string()}}),
                  EmptyDatasetError);

  write(dir / "one_class.csv", "id,path,label\nim0,data/img/im0.mbt,1\nim1,data/img/im1.mbt,1\n");
  CHECK_THROWS_AS(run("fit-svm", {{"checkpoint", ckpt},
                                  {"manifest", (dir / "one_class.csv").string()},
                                  {"out", (dir / "x.svm").string()}}),
                  DegenerateDataError);

  const auto other = write_dataset(dir / "wide", 2, 2, 8, 5, 4).string();
  CHECK_THROWS_AS(run("evaluate", {{"checkpoint", ckpt}, {"manifest", other}}), DimensionError);
  CHECK_THROWS_AS(run("oversample", {{"manifest", manifest},
                                     {"out_dir", (dir / "os").string()},
                                     {"overrides", {{"smote", {{"n_syn", 0}}}}}}),
                  ConfigError);
  CHECK_THROWS_AS(run("train", {{"manifest", manifest},
                                {"out_dir", (dir / "run2").string()},
                                {"overrides", {{"image_size", 8}, {"val_fold", 1}}}}),
                  ConfigError);
}

TEST_CASE("commands: oversample writes provenance and is byte-for-byte repeatable") {
  const auto dir = temp_dir("os");
  const auto manifest = write_dataset(dir / "data", 8, 24, 8, 2, 5).string();
  const auto out1 = dir / "a", out2 = dir / "b";
  auto lines = run("oversample", {{"manifest", manifest}, {"out_dir", out1.string()}});
  run("oversample", {{"manifest", manifest}, {"out_dir", out2.string()}});
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("synthetic=16 minority_label=1 count_0=24 count_1=24") != std::string::npos);
  const auto m = read_manifest(out1 / "manifest.csv");
  CHECK(m.rows.size() == 48);
  CHECK(m.has_provenance());
  for (const auto& row : m.rows) {
    if (!row.anchor_id) continue;
    CHECK(slurp(m.resolve(row)) == slurp(out2 / row.path));
    CHECK(*row.lambda >= 0.1);
    CHECK(*row.lambda <= 0.9);
  }
  CHECK(slurp(out1 / "manifest.csv") == slurp(out2 / "manifest.csv"));
}
