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
#include "landslide/mbt.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "landslide/error.hpp"

namespace landslide {

namespace {
constexpr char kMagic[4] = {'M', 'B', 'T', '1'};
constexpr std::size_t kHeaderBytes = 16;
}  // namespace

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f32le(std::vector<std::uint8_t>& out, float v) { put_u32le(out, std::bit_cast<std::uint32_t>(v)); }

std::uint32_t get_u32le(const std::uint8_t* p) noexcept {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float get_f32le(const std::uint8_t* p) noexcept { return std::bit_cast<float>(get_u32le(p)); }

std::vector<std::uint8_t> encode_mbt(const MultiBandImage& img) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 4 * img.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put_u32le(out, static_cast<std::uint32_t>(img.height()));
  put_u32le(out, static_cast<std::uint32_t>(img.width()));
  put_u32le(out, static_cast<std::uint32_t>(img.channels()));
  for (double v : img.data()) put_f32le(out, static_cast<float>(v));
  return out;
}

MultiBandImage decode_mbt(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes) throw FormatError("mbt: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("mbt: bad magic");
  const std::uint64_t h = get_u32le(bytes.data() + 4);
  const std::uint64_t w = get_u32le(bytes.data() + 8);
  const std::uint64_t c = get_u32le(bytes.data() + 12);
  if (h == 0 || w == 0 || c == 0) throw FormatError("mbt: zero extent in header");
  const std::uint64_t n = h * w * c;
  if (bytes.size() != kHeaderBytes + 4 * n) {
    throw FormatError("mbt: payload is " + std::to_string(bytes.size() - kHeaderBytes) + " bytes, expected " +
                      std::to_string(4 * n));
  }
  std::vector<double> data(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    data[i] = get_f32le(bytes.data() + kHeaderBytes + 4 * i);
    if (!std::isfinite(data[i])) throw FormatError("mbt: non-finite value in payload");
  }
  return MultiBandImage(h, w, c, std::move(data));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

MultiBandImage read_mbt(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_mbt(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_mbt(const std::filesystem::path& path, const MultiBandImage& img) { write_file_bytes(path, encode_mbt(img)); }

}  // namespace landslide
