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

// CSV import/export for sampled trajectories (header `t,chi,psi,omega`).

#include "chaosrc/dynamics.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace chaosrc {

void write_series_csv(std::ostream& out, const SampledSeries& series);
void write_series_csv(const std::filesystem::path& path, const SampledSeries& series);
std::string series_to_csv(const SampledSeries& series);

/// Reads a series written by write_series_csv. The sampling interval is taken
/// from the first two timestamps and every later timestamp must agree with it
/// to within 1e-9 * index. Series with fewer than two rows are rejected.
SampledSeries read_series_csv(std::istream& in);
SampledSeries read_series_csv(const std::filesystem::path& path);

}  // namespace chaosrc
