// Copyright 2026 The chaosrc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Sweep configuration files: INI-style sections with documented keys,
// command-line overrides, built-in profiles and JSON for replay manifests.

#include "chaosrc/experiment.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chaosrc {

struct ConfigKey {
  std::string name;  // "section.key"
  std::string description;
};

/// Every accepted key, in file order.
const std::vector<ConfigKey>& config_keys();

/// Sets one key. Throws std::invalid_argument for unknown keys or bad values.
/// Setting system.kind also resets system.params to that system's defaults.
void apply_override(SweepConfig& cfg, std::string_view key, std::string_view value);

/// Parses "section.key=value".
void apply_override(SweepConfig& cfg, std::string_view assignment);

/// Reads an INI file. Values start from the desk profile of the file's
/// system.kind (Lorenz if absent); every present key is then applied.
SweepConfig parse_config(std::istream& in);
SweepConfig load_config(const std::filesystem::path& path);

std::string config_to_ini(const SweepConfig& cfg);

std::vector<std::string> profile_names();
/// desk_lorenz, desk_rossler, full_lorenz, full_rossler.
std::optional<SweepConfig> builtin_profile(std::string_view name);

/// A built-in profile name or a path to an INI file.
SweepConfig resolve_config(std::string_view name_or_path);

std::string config_to_json(const SweepConfig& cfg);
SweepConfig config_from_json(std::string_view json);

}  // namespace chaosrc
