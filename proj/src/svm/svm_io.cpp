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
#include "landslide/svm.hpp"

namespace landslide::svm {

using nlohmann::json;

namespace {
constexpr char kMagic[4] = {'S', 'V', 'M', '1'};
}

std::vector<std::uint8_t> encode_model(const SvmModel& model) {
  json h;
  h["kernel"] = "rbf";
  h["gamma"] = model.gamma;
  h["c"] = model.c;
  h["bias"] = model.bias;
  h["tolerance"] = model.tolerance;
  h["n_support"] = model.support_vectors.size();
  h["dim"] = model.dim();
  h["positive_label"] = 1;
  if (model.normalization) {
    h["normalization"] = {{"mode", to_string(model.normalization->mode)},
                          {"center", model.normalization->center},
                          {"scale", model.normalization->scale}};
  } else {
    h["normalization"] = nullptr;
  }
  const std::string text = h.dump();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32le(out, static_cast<std::uint32_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  for (const auto& sv : model.support_vectors) {
    for (double v : sv) put_f32le(out, static_cast<float>(v));
  }
  for (double a : model.dual_coefs) put_f32le(out, static_cast<float>(a));
  return out;
}

SvmModel decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8) throw FormatError("svm: truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("svm: bad magic");
  const std::size_t len = get_u32le(bytes.data() + 4);
  if (bytes.size() < 8 + len) throw FormatError("svm: truncated JSON header");

  SvmModel m;
  std::size_t count = 0, dim = 0;
  try {
    const json h = json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(len));
    m.gamma = h.at("gamma").get<double>();
    m.c = h.at("c").get<double>();
    m.bias = h.at("bias").get<double>();
    m.tolerance = h.value("tolerance", 1e-3);
    count = h.at("n_support").get<std::size_t>();
    dim = h.at("dim").get<std::size_t>();
    const auto& n = h.at("normalization");
    if (!n.is_null()) {
      NormalizationStats s;
      s.mode = normalization_mode_from_string(n.at("mode").get<std::string>());
      s.center = n.at("center").get<std::vector<double>>();
      s.scale = n.at("scale").get<std::vector<double>>();
      if (s.center.size() != dim || s.scale.size() != dim) throw FormatError("svm: normalization length mismatch");
      m.normalization = std::move(s);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("svm: malformed header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("svm: ") + e.what());
  }
  if (!(m.gamma > 0.0)) throw FormatError("svm: gamma must be positive");

  const std::size_t expected = 8 + len + 4 * (count * dim + count);
  if (bytes.size() != expected) throw FormatError("svm: payload size does not match header counts");
  std::size_t off = 8 + len;
  m.support_vectors.assign(count, std::vector<double>(dim));
  for (auto& sv : m.support_vectors) {
    for (auto& v : sv) {
      v = get_f32le(bytes.data() + off);
      off += 4;
    }
  }
  m.dual_coefs.resize(count);
  for (auto& a : m.dual_coefs) {
    a = get_f32le(bytes.data() + off);
    off += 4;
  }
  return m;
}

void save_model(const std::filesystem::path& path, const SvmModel& model) { write_file_bytes(path, encode_model(model)); }

SvmModel load_model(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return decode_model(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace landslide::svm
