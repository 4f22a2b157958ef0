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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "landslide/image.hpp"

namespace landslide {

// ".mbt" container: "MBT1", then H, W, C as uint32 LE, then H*W*C float32 LE
// values channel-last row-major.
std::vector<std::uint8_t> encode_mbt(const MultiBandImage& img);
MultiBandImage decode_mbt(std::span<const std::uint8_t> bytes);

MultiBandImage read_mbt(const std::filesystem::path& path);
void write_mbt(const std::filesystem::path& path, const MultiBandImage& img);

// Little-endian helpers shared by the binary formats.
void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v);
void put_f32le(std::vector<std::uint8_t>& out, float v);
std::uint32_t get_u32le(const std::uint8_t* p) noexcept;
float get_f32le(const std::uint8_t* p) noexcept;

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace landslide
