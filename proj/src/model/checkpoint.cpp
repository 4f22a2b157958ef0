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
#include <cstring>

#include "json.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"
#include "landslide/model.hpp"

namespace landslide::model {

using nlohmann::json;

namespace {
constexpr char kMagic[4] = {'C', 'N', 'N', '1'};
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt) {
  const auto& cfg = ckpt.net.config();
  json header;
  header["config"] = {{"input_channels", cfg.input_channels}, {"input_height", cfg.input_height},
                      {"input_width", cfg.input_width},       {"conv_channels", cfg.conv_channels},
                      {"kernel", cfg.kernel},                 {"embedding_dim", cfg.embedding_dim}};
  header["tensors"] = json::array();
  for (const auto& t : ckpt.net.params()) header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  try {
    header["meta"] = json::parse(ckpt.meta_json.empty() ? "{}" : ckpt.meta_json);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("checkpoint meta is not valid JSON: ") + e.what());
  }
  const std::string text = header.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32le(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& t : ckpt.net.params()) {
    for (double v : t.values) put_f32le(out, static_cast<float>(v));
  }
  return out;
}

Checkpoint decode_checkpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw FormatError("cnn: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("cnn: bad magic");
  const std::size_t len = get_u32le(bytes.data() + 4);
  if (bytes.size() < 8 + len) throw FormatError("cnn: truncated JSON header");

  json header;
  CnnConfig cfg;
  try {
    header = json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(len));
    const auto& c = header.at("config");
    cfg.input_channels = c.at("input_channels").get<int>();
    cfg.input_height = c.at("input_height").get<int>();
    cfg.input_width = c.at("input_width").get<int>();
    cfg.conv_channels = c.at("conv_channels").get<std::vector<int>>();
    cfg.kernel = c.at("kernel").get<int>();
    cfg.embedding_dim = c.at("embedding_dim").get<int>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("cnn: malformed header: ") + e.what());
  }

  Checkpoint ckpt{CompactCnn(cfg), header.contains("meta") ? header["meta"].dump() : "{}"};
  const auto& tensors = header.at("tensors");
  if (!tensors.is_array() || tensors.size() != ckpt.net.params().size()) {
    throw FormatError("cnn: tensor list does not match the configured network");
  }
  std::size_t off = 8 + len;
  for (std::size_t k = 0; k < tensors.size(); ++k) {
    auto& t = ckpt.net.params()[k];
    try {
      if (tensors[k].at("name").get<std::string>() != t.name ||
          tensors[k].at("shape").get<std::vector<std::size_t>>() != t.shape) {
        throw FormatError("cnn: tensor " + std::to_string(k) + " does not match '" + t.name + "'");
      }
    } catch (const json::exception& e) {
      throw FormatError(std::string("cnn: malformed tensor entry: ") + e.what());
    }
    if (bytes.size() < off + 4 * t.size()) throw FormatError("cnn: truncated payload in '" + t.name + "'");
    for (auto& v : t.values) {
      v = get_f32le(bytes.data() + off);
      off += 4;
    }
  }
  if (off != bytes.size()) throw FormatError("cnn: trailing bytes after payload");
  if (!ckpt.net.all_finite()) throw FormatError("cnn: non-finite parameter");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace landslide::model
