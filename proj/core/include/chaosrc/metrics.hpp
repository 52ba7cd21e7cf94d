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

// Short- and long-term reproduction indicators for autonomous runs.

#include "chaosrc/dynamics.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace chaosrc {

/// Aligned (real, autonomous) series from N_trial independent trials.
struct EnsemblePair {
  std::vector<SampledSeries> real;
  std::vector<SampledSeries> autos;

  /// Throws std::invalid_argument unless every pair shares si and length.
  void validate() const;
  std::size_t trials() const { return real.size(); }
  std::size_t length() const { return real.empty() ? 0 : real.front().size(); }
};

/// Ensemble NMSE over trials at each time index. A zero denominator (every
/// trial's real value identical) yields +inf at that index.
std::vector<double> nmse_curve(const EnsemblePair& pairs, Component component);

struct MphResult {
  double horizon = 0.0;
  /// True when the curve never exceeded the threshold; horizon is then the
  /// full window length.
  bool censored = false;
};

/// si * (first index whose NMSE exceeds h).
MphResult mph(std::span<const double> nmse, double h, double si);

struct GridSpec {
  std::array<std::pair<double, double>, 3> bounds{};
  std::size_t resolution = 20;
  double epsilon = 1e-8;

  /// Bounding box of `reference` widened by `margin` of its extent per side.
  static GridSpec covering(const SampledSeries& reference, std::size_t resolution = 20,
                           double margin = 0.05, double epsilon = 1e-8);

  std::size_t cells() const { return resolution * resolution * resolution; }
  /// Flat cell index of a point; out-of-bounds points clip to boundary cells.
  std::size_t cell_of(const Vec3& r) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

struct DensityGrid {
  GridSpec spec;
  std::vector<double> rho;
};

/// rho_l = (M_l / L + eps) / sum_l (M_l / L + eps).
DensityGrid density(const SampledSeries& points, const GridSpec& spec);

/// sum_l |rho_a - rho_b|. Throws on mismatched geometry.
double l1_distance(const DensityGrid& a, const DensityGrid& b);

/// KLD(p || q) = sum_l p_l log(p_l / q_l), in nats.
double kl_divergence(const DensityGrid& p, const DensityGrid& q);

struct InnerProductResult {
  double value = 0.0;
  std::size_t valid_steps = 0;
  /// Steps skipped because y[j+1] == y[j].
  std::size_t duplicate_steps = 0;
  /// Steps skipped because f(y[j]) == 0.
  std::size_t fixed_point_steps = 0;
};

/// Mean cosine between the true field at y[j] and the step y[j+1] - y[j].
InnerProductResult inner_product(const SampledSeries& series, const OdeSystem& system);

/// Per-trial normalized squared error (y_real - y_auto)^2 / var_t(y_real),
/// with the variance taken over the comparison window.
std::vector<double> trial_nmse(const SampledSeries& real, const SampledSeries& autos,
                               Component component);

/// Sum over time of trial_nmse over the three components.
double trial_score(const SampledSeries& real, const SampledSeries& autos);

/// Midpoint median; throws on an empty input.
double median(std::span<const double> values);

/// True for every score strictly above factor * median(scores).
std::vector<bool> filter_outliers(std::span<const double> scores, double factor = 10.0);

struct Spectrum {
  /// Cycles per time unit, bin k at k / (K si).
  std::vector<double> frequency;
  /// Single-sided amplitudes with sum(a^2) == sum(x^2) of the mean-removed input.
  std::vector<double> amplitude;
};

/// Largest power of two not above n (n >= 1).
std::size_t floor_power_of_two(std::size_t n);

/// Amplitude spectrum of one mean-removed component, truncated to a power of two.
Spectrum amplitude_spectrum(const SampledSeries& series, Component component);

/// Same as above for a raw signal sampled at `si`.
Spectrum amplitude_spectrum(std::span<const double> signal, double si);

}  // namespace chaosrc
