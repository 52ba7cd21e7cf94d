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

#include "chaosrc/experiment.hpp"
#include "chaosrc/metrics.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chaosrc::tools {

enum class PlotKind { Mph, L1, Kld, Ip, Spectrum };

std::string_view to_string(PlotKind kind);
std::optional<PlotKind> parse_plot_kind(std::string_view name);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> yerr;
};

struct PlotData {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<PlotSeries> series;
};

/// Indicator-vs-SI series from summary rows. Mph yields one series per
/// component, Kld one per ordering, L1 and Ip a single series.
PlotData sweep_plot(std::span<const SweepRow> rows, PlotKind kind);

/// Overlay of an autonomous and a real mean spectrum. `*_err` may be empty.
PlotData spectrum_plot(const Spectrum& autos, const Spectrum& real,
                       std::span<const double> autos_err = {},
                       std::span<const double> real_err = {});

/// Long-format CSV: series,x,y,yerr.
std::string plot_to_csv(const PlotData& plot);

/// Standalone SVG line chart with error bars. Non-finite points are skipped.
std::string plot_to_svg(const PlotData& plot);

/// Writes <dir>/<kind>.csv and, if `svg`, <dir>/<kind>.svg. Returns the paths written.
std::vector<std::filesystem::path> emit_plot_data(std::span<const SweepRow> rows, PlotKind kind,
                                                  const std::filesystem::path& dir,
                                                  bool svg = true);

std::vector<std::filesystem::path> emit_plot_data(const PlotData& plot, std::string_view stem,
                                                  const std::filesystem::path& dir,
                                                  bool svg = true);

}  // namespace chaosrc::tools
