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

// JSON model files: reservoir config, seed, every weight array and the
// trained readout, so a model can be re-run exactly.

#include "chaosrc/dynamics.hpp"
#include "chaosrc/esn.hpp"

#include <filesystem>
#include <optional>
#include <string>

namespace chaosrc {

struct ModelFile {
  Reservoir reservoir;
  std::optional<Readout> readout;
  /// Sampling interval of the training series.
  double si = 0.0;
  std::size_t buffer = 0;
  OdeSystem system;
};

std::string model_to_json(const ModelFile& model);
ModelFile model_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const ModelFile& model);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace chaosrc
