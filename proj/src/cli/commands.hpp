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

#include <functional>
#include <string>
#include <string_view>

namespace landslide::cli {

enum class Channel { kResult = 1, kLog = 2 };
using Sink = std::function<void(Channel, const std::string&)>;

// Runs one subcommand described by a JSON request object. Throws
// landslide::Error subclasses on failure.
void run_command(std::string_view name, std::string_view request_json, const Sink& sink);

// Names accepted by run_command, space separated.
const char* command_names() noexcept;

}  // namespace landslide::cli
