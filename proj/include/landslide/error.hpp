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
#pragma once

#include <stdexcept>
#include <string>

namespace landslide {

// Mirrors lsd_status in landslide.h; values are part of the C ABI.
enum class ErrorCode : int {
  kArgument = 1,
  kDimension = 2,
  kEmptyDataset = 3,
  kInsufficientData = 4,
  kDegenerateData = 5,
  kIo = 6,
  kFormat = 7,
  kNumeric = 8,
  kConfig = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorCode::kArgument, w) {}
};
struct DimensionError : Error {
  explicit DimensionError(const std::string& w) : Error(ErrorCode::kDimension, w) {}
};
struct EmptyDatasetError : Error {
  explicit EmptyDatasetError(const std::string& w) : Error(ErrorCode::kEmptyDataset, w) {}
};
struct InsufficientDataError : Error {
  explicit InsufficientDataError(const std::string& w) : Error(ErrorCode::kInsufficientData, w) {}
};
struct DegenerateDataError : Error {
  explicit DegenerateDataError(const std::string& w) : Error(ErrorCode::kDegenerateData, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::kIo, w) {}
};
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(ErrorCode::kFormat, w) {}
};
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorCode::kNumeric, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::kConfig, w) {}
};

}  // namespace landslide
