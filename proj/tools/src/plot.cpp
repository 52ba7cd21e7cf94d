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

#include "chaosrc/tools/plot.hpp"

#include "chaosrc/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chaosrc::tools {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 450.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  if (f < 1.5) return mag;
  if (f < 3.5) return 2.0 * mag;
  if (f < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double step = nice_step(hi - lo);
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  }
  return ticks;
}

// Ticks in log10 space.
std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> ticks;
  const bool dense = hi - lo < 2.0;
  for (double d = std::floor(lo); d <= std::ceil(hi); d += 1.0) {
    for (double m : {1.0, 2.0, 5.0}) {
      if (!dense && m != 1.0) continue;
      const double t = d + std::log10(m);
      if (t >= lo - 1e-12 && t <= hi + 1e-12) ticks.push_back(t);
    }
  }
  return ticks;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool valid() const { return lo <= hi; }
  void pad() {
    if (!valid()) {
      lo = 0.0;
      hi = 1.0;
      return;
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double d = std::max(0.5 * std::abs(hi), 0.5);
      lo -= d;
      hi += d;
      return;
    }
    const double d = 0.05 * (hi - lo);
    lo -= d;
    hi += d;
  }
};

PlotSeries series_from(std::string name, std::span<const SweepRow> rows,
                       const IndicatorStats SweepRow::*field) {
  PlotSeries s;
  s.label = std::move(name);
  for (const auto& r : rows) {
    s.x.push_back(r.si);
    s.y.push_back((r.*field).mean);
    s.yerr.push_back((r.*field).std);
  }
  return s;
}

}  // namespace

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::Mph: return "mph";
    case PlotKind::L1: return "l1";
    case PlotKind::Kld: return "kld";
    case PlotKind::Ip: return "ip";
    case PlotKind::Spectrum: return "spectrum";
  }
  return "?";
}

std::optional<PlotKind> parse_plot_kind(std::string_view name) {
  for (PlotKind k : {PlotKind::Mph, PlotKind::L1, PlotKind::Kld, PlotKind::Ip, PlotKind::Spectrum}) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

PlotData sweep_plot(std::span<const SweepRow> rows, PlotKind kind) {
  if (rows.empty()) throw std::invalid_argument("cannot plot an empty summary");
  PlotData plot;
  plot.x_label = "sampling interval";
  plot.log_x = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.si > 0.0; });
  const std::string system(to_string(rows.front().system));
  switch (kind) {
    case PlotKind::Mph:
      plot.title = system + ": mean prediction horizon";
      plot.y_label = "MPH";
      for (std::size_t c = 0; c < 3; ++c) {
        PlotSeries s;
        s.label = std::string(to_string(kComponents[c]));
        for (const auto& r : rows) {
          s.x.push_back(r.si);
          s.y.push_back(r.mph[c].mean);
          s.yerr.push_back(r.mph[c].std);
        }
        plot.series.push_back(std::move(s));
      }
      break;
    case PlotKind::L1:
      plot.title = system + ": L1 distance of densities";
      plot.y_label = "L1";
      plot.series.push_back(series_from("l1", rows, &SweepRow::l1));
      break;
    case PlotKind::Kld:
      plot.title = system + ": Kullback-Leibler divergence";
      plot.y_label = "KLD";
      plot.series.push_back(series_from("real||auto", rows, &SweepRow::kld_real_auto));
      plot.series.push_back(series_from("auto||real", rows, &SweepRow::kld_auto_real));
      break;
    case PlotKind::Ip:
      plot.title = system + ": inner product";
      plot.y_label = "IP";
      plot.series.push_back(series_from("ip", rows, &SweepRow::ip));
      break;
    case PlotKind::Spectrum:
      throw std::invalid_argument("spectrum plots are built from series, not summaries");
  }
  return plot;
}

PlotData spectrum_plot(const Spectrum& autos, const Spectrum& real,
                       std::span<const double> autos_err, std::span<const double> real_err) {
  PlotData plot;
  plot.title = "amplitude spectrum";
  plot.x_label = "frequency";
  plot.y_label = "amplitude";
  const auto make = [](std::string name, const Spectrum& s, std::span<const double> err) {
    if (!err.empty() && err.size() != s.amplitude.size()) {
      throw std::invalid_argument("spectrum error bars do not match amplitudes");
    }
    PlotSeries out;
    out.label = std::move(name);
    out.x = s.frequency;
    out.y = s.amplitude;
    out.yerr = err.empty() ? std::vector<double>(s.amplitude.size(), 0.0)
                           : std::vector<double>(err.begin(), err.end());
    return out;
  };
  plot.series.push_back(make("autonomous", autos, autos_err));
  plot.series.push_back(make("real", real, real_err));
  return plot;
}

std::string plot_to_csv(const PlotData& plot) {
  std::ostringstream out;
  out << "series,x,y,yerr\n";
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      out << s.label << ',' << csv::format_double(s.x[i]) << ',' << csv::format_double(s.y[i])
          << ',' << csv::format_double(i < s.yerr.size() ? s.yerr[i] : 0.0) << '\n';
    }
  }
  return out.str();
}

std::string plot_to_svg(const PlotData& plot) {
  const auto tx = [&](double x) { return plot.log_x ? std::log10(x) : x; };

  Range xr, yr;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (plot.log_x && !(s.x[i] > 0.0))) continue;
      xr.add(tx(s.x[i]));
      const double e = i < s.yerr.size() && std::isfinite(s.yerr[i]) ? s.yerr[i] : 0.0;
      yr.add(s.y[i] - e);
      yr.add(s.y[i] + e);
    }
  }
  xr.pad();
  yr.pad();

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  const auto px = [&](double x) { return kLeft + (tx(x) - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return kTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escape(plot.title) << "</text>\n";
  out << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";

  const auto xticks = plot.log_x ? log_ticks(xr.lo, xr.hi) : linear_ticks(xr.lo, xr.hi);
  for (double t : xticks) {
    const double v = plot.log_x ? std::pow(10.0, t) : t;
    const double x = px(v);
    out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x)
        << "\" y2=\"" << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18)
        << "\" text-anchor=\"middle\">" << label(v) << "</text>\n";
  }
  for (double t : linear_ticks(yr.lo, yr.hi)) {
    const double y = py(t);
    out << "<line x1=\"" << num(kLeft - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft)
        << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(y + 4)
        << "\" text-anchor=\"end\">" << label(t) << "</text>\n";
  }
  out << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 15)
      << "\" text-anchor=\"middle\">" << escape(plot.x_label) << (plot.log_x ? " (log)" : "")
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << num(kTop + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << num(kTop + ph / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (plot.log_x && !(s.x[i] > 0.0))) continue;
      const double x = px(s.x[i]);
      const double y = py(s.y[i]);
      if (!points.empty()) points += ' ';
      points += num(x) + ',' + num(y);
      const double e = i < s.yerr.size() && std::isfinite(s.yerr[i]) ? s.yerr[i] : 0.0;
      if (e > 0.0) {
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(py(s.y[i] - e)) << "\" x2=\""
            << num(x) << "\" y2=\"" << num(py(s.y[i] + e)) << "\" stroke=\"" << color
            << "\"/>\n";
      }
      out << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    if (!points.empty()) {
      out << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = kTop + 15.0 + 18.0 * static_cast<double>(k);
    const double lx = kWidth - kRight + 15.0;
    out << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 20)
        << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(lx + 26) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
        << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::vector<std::filesystem::path> emit_plot_data(const PlotData& plot, std::string_view stem,
                                                  const std::filesystem::path& dir, bool svg) {
  std::vector<std::filesystem::path> written;
  const auto base = dir / std::string(stem);
  written.push_back(base.string() + ".csv");
  csv::write_file(written.back(), plot_to_csv(plot));
  if (svg) {
    written.push_back(base.string() + ".svg");
    csv::write_file(written.back(), plot_to_svg(plot));
  }
  return written;
}

std::vector<std::filesystem::path> emit_plot_data(std::span<const SweepRow> rows, PlotKind kind,
                                                  const std::filesystem::path& dir, bool svg) {
  return emit_plot_data(sweep_plot(rows, kind), to_string(kind), dir, svg);
}

}  // namespace chaosrc::tools
