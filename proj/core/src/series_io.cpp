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

#include "chaosrc/series_io.hpp"

#include "chaosrc/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chaosrc {

void write_series_csv(std::ostream& out, const SampledSeries& series) {
  out << "t,chi,psi,omega\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& r = series.state(i);
    out << csv::format_double(series.time(i)) << ',' << csv::format_double(r[0]) << ','
        << csv::format_double(r[1]) << ',' << csv::format_double(r[2]) << '\n';
  }
}

std::string series_to_csv(const SampledSeries& series) {
  std::ostringstream os;
  write_series_csv(os, series);
  return os.str();
}

void write_series_csv(const std::filesystem::path& path, const SampledSeries& series) {
  csv::write_file(path, series_to_csv(series));
}

SampledSeries read_series_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const std::size_t ct = table.column("t");
  const std::size_t c0 = table.column("chi");
  const std::size_t c1 = table.column("psi");
  const std::size_t c2 = table.column("omega");
  if (table.rows.size() < 2) throw std::runtime_error("series needs at least two rows");

  std::vector<double> times;
  std::vector<Vec3> points;
  times.reserve(table.rows.size());
  points.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    times.push_back(csv::parse_double(row[ct]));
    points.emplace_back(csv::parse_double(row[c0]), csv::parse_double(row[c1]),
                        csv::parse_double(row[c2]));
  }
  const double t0 = times[0];
  // Offset series: spacing from the full span.
  const double si = t0 == 0.0 ? times[1]
                              : (times.back() - t0) / static_cast<double>(times.size() - 1);
  if (!(si > 0.0)) throw std::runtime_error("series timestamps must increase");
  for (std::size_t i = 2; i < times.size(); ++i) {
    const double expected = t0 + static_cast<double>(i) * si;
    if (std::abs(times[i] - expected) > 1e-9 * static_cast<double>(i) * std::max(1.0, si)) {
      throw std::runtime_error("series is not uniformly sampled at row " + std::to_string(i));
    }
  }
  return SampledSeries(si, t0, std::move(points));
}

SampledSeries read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_series_csv(in);
}

}  // namespace chaosrc
