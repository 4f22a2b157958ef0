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
#include "landslide/dataset.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "landslide/core.hpp"
#include "landslide/error.hpp"
#include "landslide/mbt.hpp"

namespace landslide {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

template <typename T>
std::optional<T> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::filesystem::path DatasetManifest::resolve(const ManifestRow& row) const {
  const std::filesystem::path p(row.path);
  return p.is_absolute() ? p : base_dir / p;
}

bool DatasetManifest::has_folds() const noexcept {
  for (const auto& r : rows) {
    if (!r.fold) return false;
  }
  return !rows.empty();
}

bool DatasetManifest::has_provenance() const noexcept {
  for (const auto& r : rows) {
    if (r.anchor_id) return true;
  }
  return false;
}

DatasetManifest read_manifest(const std::filesystem::path& path, bool labels_optional) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  DatasetManifest m;
  m.base_dir = path.parent_path();

  std::string line;
  if (!std::getline(in, line)) throw EmptyDatasetError(path.string() + ": empty manifest (no header)");
  std::vector<std::string> header;
  for (auto& h : split_csv_line(line)) header.push_back(trim(h));
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto c_id = column("id"), c_path = column("path"), c_label = column("label"), c_fold = column("fold");
  const auto c_anchor = column("anchor_id"), c_neighbor = column("neighbor_id"), c_lambda = column("lambda");
  if (!c_id || !c_path) throw FormatError(path.string() + ":1: manifest needs 'id' and 'path' columns");
  if (!c_label && !labels_optional) throw FormatError(path.string() + ":1: manifest needs a 'label' column");

  std::set<std::string> seen;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(lineno) + ": ";
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw FormatError(where + "expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    for (auto& c : cells) c = trim(c);
    ManifestRow row;
    row.id = cells[*c_id];
    row.path = cells[*c_path];
    if (row.id.empty() || row.path.empty()) throw FormatError(where + "empty id or path");
    if (!seen.insert(row.id).second) throw FormatError(where + "duplicate id '" + row.id + "'");
    if (c_label && !cells[*c_label].empty()) {
      const auto label = parse_number<int>(cells[*c_label]);
      if (!label || (*label != 0 && *label != 1)) throw FormatError(where + "label must be 0 or 1");
      row.label = label;
    } else if (!labels_optional) {
      throw FormatError(where + "missing label");
    }
    if (c_fold && !cells[*c_fold].empty()) {
      row.fold = parse_number<int>(cells[*c_fold]);
      if (!row.fold || *row.fold < 0) throw FormatError(where + "fold must be a non-negative integer");
    }
    if (c_anchor && !cells[*c_anchor].empty()) row.anchor_id = cells[*c_anchor];
    if (c_neighbor && !cells[*c_neighbor].empty()) row.neighbor_id = cells[*c_neighbor];
    if (c_lambda && !cells[*c_lambda].empty()) {
      row.lambda = parse_number<double>(cells[*c_lambda]);
      if (!row.lambda) throw FormatError(where + "lambda is not a number");
    }
    if (!std::filesystem::exists(m.resolve(row))) throw IoError(where + "file not found: " + m.resolve(row).string());
    m.rows.push_back(std::move(row));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  bool any_label = false, any_fold = false;
  for (const auto& r : manifest.rows) {
    any_label = any_label || r.label.has_value();
    any_fold = any_fold || r.fold.has_value();
  }
  const bool prov = manifest.has_provenance();
  std::ostringstream os;
  os << "id,path";
  if (any_label) os << ",label";
  if (any_fold) os << ",fold";
  if (prov) os << ",anchor_id,neighbor_id,lambda";
  os << "\n";
  char buf[32];
  for (const auto& r : manifest.rows) {
    os << r.id << "," << r.path;
    if (any_label) os << "," << (r.label ? std::to_string(*r.label) : "");
    if (any_fold) os << "," << (r.fold ? std::to_string(*r.fold) : "");
    if (prov) {
      os << "," << r.anchor_id.value_or("") << "," << r.neighbor_id.value_or("") << ",";
      if (r.lambda) {
        const auto res = std::to_chars(buf, buf + sizeof buf, *r.lambda);
        os << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
      }
    }
    os << "\n";
  }
  const auto s = os.str();
  write_file_bytes(path, std::vector<std::uint8_t>(s.begin(), s.end()));
}

std::vector<Sample> load_samples(const DatasetManifest& manifest, std::span<const std::size_t> bands,
                                 std::size_t size) {
  std::vector<Sample> out;
  out.reserve(manifest.rows.size());
  for (const auto& row : manifest.rows) {
    auto img = read_mbt(manifest.resolve(row));
    try {
      img = select_bands(img, bands);
    } catch (const Error& e) {
      throw DimensionError(row.id + ": " + e.what());
    }
    if (size > 0) img = resize_bilinear(img, size, size);
    if (!out.empty() && !out.front().image.same_shape(img)) {
      throw DimensionError(row.id + ": image " + img.shape_string() + " differs from " +
                           out.front().image.shape_string());
    }
    out.push_back({row.id, std::move(img), row.label.value_or(-1), row.fold.value_or(-1)});
  }
  return out;
}

}  // namespace landslide
