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

#include <cmath>
#include <filesystem>

#include "landslide/core.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"
#include "landslide/rng.hpp"

using namespace landslide;

namespace {

MultiBandImage random_image(Rng& rng, std::size_t h, std::size_t w, std::size_t c, double scale = 1.0) {
  MultiBandImage img(h, w, c);
  for (auto& v : img.data()) v = scale * rng.normal();
  return img;
}

MultiBandImage band_from(std::size_t h, std::size_t w, const std::vector<double>& values) {
  return MultiBandImage(h, w, 1, values);
}

}  // namespace

TEST_CASE("image construction validates extents and data") {
  CHECK_THROWS_AS(MultiBandImage(2, 2, 1, std::vector<double>(3)), DimensionError);
  CHECK_THROWS_AS(MultiBandImage(0, 2, 1), ArgumentError);
  CHECK_THROWS_AS(MultiBandImage(1, 1, 1, std::vector<double>{NAN}), ArgumentError);
  MultiBandImage img(2, 3, 4);
  CHECK(img.size() == 24);
  img.at(1, 2, 3) = 5.0;
  CHECK(img.data()[(1 * 3 + 2) * 4 + 3] == 5.0);
}

TEST_CASE("soft labels enforce the simplex") {
  CHECK_NOTHROW(SoftLabel(0.25, 0.75));
  CHECK_THROWS_AS(SoftLabel(0.5, 0.6), ArgumentError);
  CHECK_THROWS_AS(SoftLabel(-0.1, 1.1), ArgumentError);
  const auto m = SoftLabel::mix(SoftLabel::hard(1), SoftLabel::hard(0), 0.3);
  CHECK(m.landslide() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(SoftLabel(0.5, 0.5).argmax() == 1);
}

TEST_CASE("rng streams are reproducible and children independent of position") {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(7);
  const auto child_before = c.child(3).next_u64();
  for (int i = 0; i < 10; ++i) c.next_u64();
  CHECK(c.child(3).next_u64() == child_before);
  CHECK(Rng(7).child(3).next_u64() != Rng(7).child(4).next_u64());
  // First output of xoshiro256** seeded by splitmix64(0), a published value.
  CHECK(Rng(0).next_u64() == 0x99ec5f36cb75f2b4ULL);
}

TEST_CASE("rng distributions stay in range and have the right moments") {
  Rng rng(11);
  double sum = 0.0, sumsq = 0.0, bsum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double z = rng.normal();
    sum += z;
    sumsq += z * z;
    const double bt = rng.beta(2.0, 2.0);
    CHECK(bt > 0.0);
    CHECK(bt < 1.0);
    bsum += bt;
    CHECK(rng.below(7) < 7);
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
  CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.03));
  CHECK(bsum / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("ssim identity, anti-correlation and symmetry") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto a = random_image(rng, 13, 17, 3);
    const auto b = random_image(rng, 13, 17, 3);
    CHECK(std::abs(ssim(a, a) - 1.0) <= 1e-12);
    CHECK(ssim(a, b) == ssim(b, a));
    const double s = ssim(a, b);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
  }
  // x with zero mean inside every 8x8 window, against -x.
  auto x = random_image(rng, 16, 16, 2);
  for (std::size_t wy = 0; wy < 16; wy += 8) {
    for (std::size_t wx = 0; wx < 16; wx += 8) {
      for (std::size_t b = 0; b < 2; ++b) {
        double m = 0.0;
        for (std::size_t y = wy; y < wy + 8; ++y)
          for (std::size_t xx = wx; xx < wx + 8; ++xx) m += x.at(y, xx, b);
        m /= 64.0;
        for (std::size_t y = wy; y < wy + 8; ++y)
          for (std::size_t xx = wx; xx < wx + 8; ++xx) x.at(y, xx, b) -= m;
      }
    }
  }
  auto neg = x;
  for (auto& v : neg.data()) v = -v;
  const double s = ssim(x, neg);
  CHECK(s >= -1.0);
  CHECK(s <= 0.0);
}

TEST_CASE("ssim on fixed 8x8 rasters matches the brute-force window oracle") {
  // tests/oracles/frozen_values.py: ssim_8x8
  std::vector<double> a(64), b(64);
  for (int i = 0; i < 64; ++i) {
    a[i] = i / 63.0;
    b[i] = (i * 37 % 64) / 63.0;
  }
  CHECK(ssim(band_from(8, 8, a), band_from(8, 8, b)) == doctest::Approx(0.0554928556342693).epsilon(1e-12));
}

TEST_CASE("ssim rejects mismatched shapes") {
  CHECK_THROWS_AS(ssim(MultiBandImage(4, 4, 1), MultiBandImage(4, 4, 2)), DimensionError);
}

TEST_CASE("standard normalization on a known band") {
  std::vector<MultiBandImage> imgs{band_from(2, 2, {1, 2, 3, 4})};
  const auto s = fit_normalization(imgs, NormalizationMode::kStandard);
  CHECK(s.center[0] == 2.5);
  CHECK(s.scale[0] == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
}

TEST_CASE("robust normalization uses median and type-7 IQR") {
  std::vector<MultiBandImage> imgs{band_from(1, 5, {1, 2, 3, 4, 100})};
  const auto s = fit_normalization(imgs, NormalizationMode::kRobust);
  CHECK(s.center[0] == 3.0);
  CHECK(s.scale[0] == 2.0);
  CHECK(quantile_type7({4, 1, 3, 2}, 0.5) == 2.5);
}

TEST_CASE("constant band gets unit scale and normalizes to zero") {
  std::vector<MultiBandImage> imgs{MultiBandImage(3, 3, 2, 0.1), MultiBandImage(3, 3, 2, 0.1)};
  imgs[1].at(0, 0, 0) = 5.0;  // band 0 varies, band 1 constant
  for (auto mode : {NormalizationMode::kStandard, NormalizationMode::kRobust}) {
    const auto s = fit_normalization(imgs, mode);
    CHECK(s.scale[1] == 1.0);
    const auto out = apply_normalization(imgs[0], s);
    for (std::size_t i = 1; i < out.size(); i += 2) CHECK(out.data()[i] == 0.0);
  }
}

TEST_CASE("normalization identities and round trip") {
  Rng rng(3);
  std::vector<MultiBandImage> imgs;
  for (int i = 0; i < 5; ++i) imgs.push_back(random_image(rng, 6, 5, 4, 10.0));
  CHECK_THROWS_AS(fit_normalization(std::span<const MultiBandImage>{}, NormalizationMode::kStandard),
                  EmptyDatasetError);
  for (auto mode : {NormalizationMode::kStandard, NormalizationMode::kRobust}) {
    const auto s = fit_normalization(imgs, mode);
    for (const auto& img : imgs) {
      const auto back = invert_normalization(apply_normalization(img, s), s);
      for (std::size_t i = 0; i < img.size(); ++i) CHECK(std::abs(back.data()[i] - img.data()[i]) <= 1e-9);
    }
    MultiBandImage centre(2, 2, 4);
    for (std::size_t i = 0; i < centre.size(); ++i) centre.data()[i] = s.center[i % 4];
    const auto normalized = apply_normalization(centre, s);
    for (double v : normalized.data()) CHECK(v == 0.0);
  }
  NormalizationStats identity{NormalizationMode::kStandard, {0, 0, 0, 0}, {1, 1, 1, 1}};
  CHECK(apply_normalization(imgs[0], identity) == imgs[0]);
  CHECK_THROWS_AS(apply_normalization(MultiBandImage(2, 2, 3), identity), DimensionError);
}

TEST_CASE("bilinear resize") {
  SUBCASE("2x2 to 4x4 matches the half-pixel oracle") {
    const auto out = resize_bilinear(band_from(2, 2, {0, 1, 2, 3}), 4, 4);
    const double expected[16] = {0.0, 0.25, 0.75, 1.0, 0.5, 0.75, 1.25, 1.5,
                                 1.5, 1.75, 2.25, 2.5, 2.0, 2.25, 2.75, 3.0};
    for (int i = 0; i < 16; ++i) CHECK(out.data()[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  }
  SUBCASE("3x5 down to 2x3 matches the half-pixel oracle") {
    std::vector<double> v(15);
    for (int i = 0; i < 15; ++i) v[i] = std::pow(i, 1.5);
    const auto out = resize_bilinear(band_from(3, 5, v), 2, 3);
    const double expected[6] = {3.3381348526414136, 6.751385137922676, 11.684656188840787,
                                28.020241326960658, 35.80697933060283, 44.29526143583968};
    for (int i = 0; i < 6; ++i) CHECK(out.data()[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  }
  SUBCASE("identity and constants") {
    Rng rng(5);
    const auto img = random_image(rng, 7, 9, 3);
    CHECK(resize_bilinear(img, 7, 9) == img);
    const MultiBandImage flat(5, 6, 2, 0.3);
    for (auto [h, w] : {std::pair{11, 3}, std::pair{2, 2}, std::pair{17, 23}}) {
      const auto out = resize_bilinear(flat, h, w);
      for (double v : out.data()) CHECK(v == 0.3);
    }
  }
  CHECK_THROWS_AS(resize_bilinear(MultiBandImage(2, 2, 1), 0, 3), ArgumentError);
}

TEST_CASE("band selection") {
  MultiBandImage img(1, 2, 3, std::vector<double>{1, 2, 3, 4, 5, 6});
  const std::vector<std::size_t> bands{2, 0};
  const auto out = select_bands(img, bands);
  CHECK(out.channels() == 2);
  CHECK(out.data()[0] == 3);
  CHECK(out.data()[3] == 4);
  const std::vector<std::size_t> bad{3};
  CHECK_THROWS_AS(select_bands(img, bad), ArgumentError);
}

TEST_CASE("mbt container") {
  Rng rng(9);
  auto img = random_image(rng, 3, 4, 2);
  for (auto& v : img.data()) v = static_cast<float>(v);
  const auto bytes = encode_mbt(img);
  REQUIRE(bytes.size() == 16 + 4 * 24);
  CHECK(bytes[0] == 'M');
  CHECK(bytes[3] == '1');
  CHECK(get_u32le(bytes.data() + 4) == 3);
  CHECK(get_u32le(bytes.data() + 12) == 2);
  CHECK(decode_mbt(bytes) == img);

  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_mbt(bad_magic), FormatError);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_mbt(truncated), FormatError);

  const auto path = std::filesystem::temp_directory_path() / "landslide_core_test.mbt";
  write_mbt(path, img);
  CHECK(read_mbt(path) == img);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_mbt(path), IoError);
}
