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

#include "chaosrc/metrics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace chaosrc {

void EnsemblePair::validate() const {
  if (real.empty()) throw std::invalid_argument("ensemble must contain at least one trial");
  if (real.size() != autos.size()) throw std::invalid_argument("ensemble sides differ in size");
  const double si = real.front().si();
  const std::size_t k = real.front().size();
  for (std::size_t i = 0; i < real.size(); ++i) {
    if (real[i].size() != k || autos[i].size() != k) {
      throw std::invalid_argument("ensemble series differ in length");
    }
    if (real[i].si() != si || autos[i].si() != si) {
      throw std::invalid_argument("ensemble series differ in sampling interval");
    }
  }
}

std::vector<double> nmse_curve(const EnsemblePair& pairs, Component component) {
  pairs.validate();
  const std::size_t trials = pairs.trials();
  const std::size_t k = pairs.length();
  std::vector<double> out(k);
  for (std::size_t t = 0; t < k; ++t) {
    double mean = 0.0;
    for (std::size_t i = 0; i < trials; ++i) mean += pairs.real[i].value(t, component);
    mean /= static_cast<double>(trials);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      const double r = pairs.real[i].value(t, component);
      const double a = pairs.autos[i].value(t, component);
      num += (r - a) * (r - a);
      den += (r - mean) * (r - mean);
    }
    out[t] = den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
  }
  return out;
}

MphResult mph(std::span<const double> nmse, double h, double si) {
  if (!(h > 0.0)) throw std::invalid_argument("MPH threshold must be positive");
  for (std::size_t t = 0; t < nmse.size(); ++t) {
    // NaN counts as an exceedance.
    if (!(nmse[t] <= h)) return {si * static_cast<double>(t), false};
  }
  return {si * static_cast<double>(nmse.size()), true};
}

GridSpec GridSpec::covering(const SampledSeries& reference, std::size_t resolution,
                            double margin, double epsilon) {
  if (reference.empty()) throw std::invalid_argument("grid reference series is empty");
  if (resolution == 0) throw std::invalid_argument("grid resolution must be positive");
  GridSpec spec;
  spec.resolution = resolution;
  spec.epsilon = epsilon;
  for (Eigen::Index d = 0; d < 3; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : reference.points()) {
      lo = std::min(lo, r[d]);
      hi = std::max(hi, r[d]);
    }
    double extent = hi - lo;
    if (!(extent > 0.0)) extent = 1.0;
    spec.bounds[static_cast<std::size_t>(d)] = {lo - margin * extent, hi + margin * extent};
  }
  return spec;
}

std::size_t GridSpec::cell_of(const Vec3& r) const {
  std::size_t flat = 0;
  const auto res = static_cast<double>(resolution);
  for (std::size_t d = 0; d < 3; ++d) {
    const auto [lo, hi] = bounds[d];
    const double scaled = (r[static_cast<Eigen::Index>(d)] - lo) / (hi - lo) * res;
    std::size_t idx = 0;
    if (scaled >= res) {
      idx = resolution - 1;
    } else if (scaled > 0.0) {
      idx = static_cast<std::size_t>(scaled);
    }
    flat = flat * resolution + idx;
  }
  return flat;
}

DensityGrid density(const SampledSeries& points, const GridSpec& spec) {
  if (points.empty()) throw std::invalid_argument("density needs at least one point");
  if (spec.resolution == 0) throw std::invalid_argument("grid resolution must be positive");
  std::vector<double> counts(spec.cells(), 0.0);
  for (const auto& r : points.points()) counts[spec.cell_of(r)] += 1.0;

  const double total = static_cast<double>(points.size());
  double norm = 0.0;
  for (auto& c : counts) {
    c = c / total + spec.epsilon;
    norm += c;
  }
  for (auto& c : counts) c /= norm;
  return {spec, std::move(counts)};
}

namespace {

void require_same_geometry(const DensityGrid& a, const DensityGrid& b) {
  if (!(a.spec.bounds == b.spec.bounds) || a.spec.resolution != b.spec.resolution ||
      a.rho.size() != b.rho.size()) {
    throw std::invalid_argument("density grids have different geometry");
  }
}

}  // namespace

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
  require_same_geometry(a, b);
  double sum = 0.0;
  for (std::size_t l = 0; l < a.rho.size(); ++l) sum += std::abs(a.rho[l] - b.rho[l]);
  return sum;
}

double kl_divergence(const DensityGrid& p, const DensityGrid& q) {
  require_same_geometry(p, q);
  double sum = 0.0;
  for (std::size_t l = 0; l < p.rho.size(); ++l) {
    if (p.rho[l] > 0.0) sum += p.rho[l] * std::log(p.rho[l] / q.rho[l]);
  }
  // Rounding can leave a tiny negative value for identical inputs.
  return std::max(sum, 0.0);
}

InnerProductResult inner_product(const SampledSeries& series, const OdeSystem& system) {
  if (series.size() < 2) throw std::invalid_argument("inner product needs at least two points");
  InnerProductResult out;
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < series.size(); ++j) {
    const Vec3 step = series.state(j + 1) - series.state(j);
    const double step_norm = step.norm();
    if (step_norm == 0.0) {
      ++out.duplicate_steps;
      continue;
    }
    const Vec3 f = eval_field(system, series.state(j));
    const double f_norm = f.norm();
    if (f_norm == 0.0) {
      ++out.fixed_point_steps;
      continue;
    }
    sum += std::clamp(f.dot(step) / (f_norm * step_norm), -1.0, 1.0);
    ++out.valid_steps;
  }
  out.value = out.valid_steps > 0 ? sum / static_cast<double>(out.valid_steps) : 0.0;
  return out;
}

std::vector<double> trial_nmse(const SampledSeries& real, const SampledSeries& autos,
                               Component component) {
  if (real.size() != autos.size() || real.empty()) {
    throw std::invalid_argument("trial series must be non-empty and aligned");
  }
  const std::size_t k = real.size();
  double mean = 0.0;
  for (std::size_t t = 0; t < k; ++t) mean += real.value(t, component);
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (std::size_t t = 0; t < k; ++t) {
    const double d = real.value(t, component) - mean;
    var += d * d;
  }
  var /= static_cast<double>(k);
  if (!(var > 0.0)) throw std::invalid_argument("real component has zero variance");

  std::vector<double> out(k);
  for (std::size_t t = 0; t < k; ++t) {
    const double e = real.value(t, component) - autos.value(t, component);
    out[t] = e * e / var;
  }
  return out;
}

double trial_score(const SampledSeries& real, const SampledSeries& autos) {
  double ts = 0.0;
  for (const auto c : kComponents) {
    const auto curve = trial_nmse(real, autos, c);
    ts = std::accumulate(curve.begin(), curve.end(), ts);
  }
  return ts;
}

double median(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<bool> filter_outliers(std::span<const double> scores, double factor) {
  if (scores.empty()) throw std::invalid_argument("no trial scores to filter");
  const double threshold = factor * median(scores);
  std::vector<bool> discarded(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    discarded[i] = std::isnan(scores[i]) || scores[i] > threshold;
  }
  return discarded;
}

std::size_t floor_power_of_two(std::size_t n) {
  if (n == 0) throw std::invalid_argument("no power of two below 1");
  std::size_t p = 1;
  while (p <= n / 2) p *= 2;
  return p;
}

namespace {

// The FFTW planner is not re-entrant; plan execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Spectrum amplitude_spectrum(std::span<const double> signal, double si) {
  if (signal.size() < 2) throw std::invalid_argument("spectrum needs at least two samples");
  if (!(si > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  const std::size_t k = floor_power_of_two(signal.size());
  const std::size_t bins = k / 2 + 1;

  double* in = fftw_alloc_real(k);
  fftw_complex* out = fftw_alloc_complex(bins);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(k), in, out, FFTW_ESTIMATE);
  }
  const double mean =
      std::accumulate(signal.begin(), signal.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
      static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) in[i] = signal[i] - mean;
  fftw_execute(plan);

  Spectrum s;
  s.frequency.resize(bins);
  s.amplitude.resize(bins);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  for (std::size_t b = 0; b < bins; ++b) {
    const double mag = std::hypot(out[b][0], out[b][1]) * scale;
    const bool edge = b == 0 || b == k / 2;
    s.amplitude[b] = edge ? mag : std::sqrt(2.0) * mag;
    s.frequency[b] = static_cast<double>(b) / (static_cast<double>(k) * si);
  }
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

Spectrum amplitude_spectrum(const SampledSeries& series, Component component) {
  const auto values = series.component(component);
  return amplitude_spectrum(values, series.si());
}

}  // namespace chaosrc
