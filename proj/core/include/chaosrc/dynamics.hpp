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

// Chaotic vector fields, fixed-step RK4 integration and uniform sampling.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chaosrc {

using Vec3 = Eigen::Vector3d;

inline constexpr double kDefaultBlowupBound = 1e6;

enum class SystemKind { Lorenz, Rossler };

std::string_view to_string(SystemKind kind);
std::optional<SystemKind> parse_system_kind(std::string_view name);

/// A three-dimensional autonomous chaotic flow.
///
/// Lorenz parameters are (p, r, b), Rossler parameters are (a, b, c). Both
/// are stored positionally in `params`.
struct OdeSystem {
  SystemKind kind = SystemKind::Lorenz;
  std::array<double, 3> params{10.0, 28.0, 8.0 / 3.0};

  static OdeSystem lorenz(double p = 10.0, double r = 28.0, double b = 8.0 / 3.0);
  static OdeSystem rossler(double a = 0.2, double b = 0.2, double c = 5.7);
  static OdeSystem defaults(SystemKind kind);

  std::string_view name() const { return to_string(kind); }

  friend bool operator==(const OdeSystem&, const OdeSystem&) = default;
};

enum class Component : std::size_t { Chi = 0, Psi = 1, Omega = 2 };

inline constexpr std::array<Component, 3> kComponents{Component::Chi, Component::Psi,
                                                      Component::Omega};

std::string_view to_string(Component c);
std::optional<Component> parse_component(std::string_view name);

struct StatePoint {
  double t = 0.0;
  double chi = 0.0;
  double psi = 0.0;
  double omega = 0.0;

  Vec3 state() const { return {chi, psi, omega}; }
  static StatePoint at(double t, const Vec3& r) { return {t, r[0], r[1], r[2]}; }
};

/// Uniformly sampled trajectory. Point i sits at time t0 + i * si.
class SampledSeries {
 public:
  SampledSeries() = default;
  explicit SampledSeries(double si, double t0 = 0.0);
  SampledSeries(double si, double t0, std::vector<Vec3> points);

  double si() const { return si_; }
  double t0() const { return t0_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  double time(std::size_t i) const { return t0_ + static_cast<double>(i) * si_; }
  const Vec3& state(std::size_t i) const { return points_[i]; }
  double value(std::size_t i, Component c) const {
    return points_[i][static_cast<Eigen::Index>(c)];
  }
  StatePoint point(std::size_t i) const { return StatePoint::at(time(i), points_[i]); }
  const std::vector<Vec3>& points() const { return points_; }

  std::vector<double> component(Component c) const;

  void push_back(const Vec3& r) { points_.push_back(r); }
  void reserve(std::size_t n) { points_.reserve(n); }

  /// Copy of `count` points starting at `begin`, re-based to t0 = 0.
  SampledSeries slice(std::size_t begin, std::size_t count) const;

  /// Every `stride`-th point, starting at index 0.
  SampledSeries downsample(std::size_t stride) const;

 private:
  double si_ = 1.0;
  double t0_ = 0.0;
  std::vector<Vec3> points_;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, double bound);
  double time() const { return time_; }

 private:
  double time_;
};

/// Right-hand side f(r) of the flow.
Vec3 eval_field(const OdeSystem& system, const Vec3& r);
inline Vec3 eval_field(const OdeSystem& system, const StatePoint& s) {
  return eval_field(system, s.state());
}

inline bool exceeds_bound(const Vec3& r, double bound) {
  return !r.allFinite() || r.cwiseAbs().maxCoeff() > bound;
}

/// One classical fourth-order Runge-Kutta step of dr/dt = field(r).
template <class Field>
Vec3 rk4_step(Field&& field, const Vec3& r, double h) {
  const Vec3 k1 = field(r);
  const Vec3 k2 = field(Vec3(r + 0.5 * h * k1));
  const Vec3 k3 = field(Vec3(r + 0.5 * h * k2));
  const Vec3 k4 = field(Vec3(r + h * k3));
  return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Number of fixed steps of size `step` covering `duration`.
std::size_t step_count(double duration, double step);

/// Dense RK4 trajectory for an arbitrary field, including the initial point.
template <class Field>
std::vector<StatePoint> integrate_field(Field&& field, const StatePoint& initial,
                                        double duration, double step,
                                        double blowup_bound = kDefaultBlowupBound) {
  const std::size_t n = step_count(duration, step);
  std::vector<StatePoint> out;
  out.reserve(n + 1);
  out.push_back(initial);
  Vec3 r = initial.state();
  for (std::size_t i = 1; i <= n; ++i) {
    r = rk4_step(field, r, step);
    const double t = initial.t + static_cast<double>(i) * step;
    if (exceeds_bound(r, blowup_bound)) throw DivergenceError(t, blowup_bound);
    out.push_back(StatePoint::at(t, r));
  }
  return out;
}

std::vector<StatePoint> integrate(const OdeSystem& system, const StatePoint& initial,
                                  double duration, double internal_step,
                                  double blowup_bound = kDefaultBlowupBound);

struct SampleOptions {
  double transient = 50.0;
  double max_internal_step = 1e-3;
  double blowup_bound = kDefaultBlowupBound;
};

/// Integration substeps per sample so that si is an exact multiple of the step.
std::size_t substeps_per_sample(double si, double max_internal_step = 1e-3);

/// Discards `transient` time, then records `count` points spaced `si` apart.
/// The returned series starts at t0 = 0.
SampledSeries sample(const OdeSystem& system, const StatePoint& initial, double si,
                     std::size_t count, const SampleOptions& options = {});

/// Draws an initial condition uniformly from a box enclosing the attractor.
StatePoint random_initial_state(const OdeSystem& system, std::mt19937_64& rng);

}  // namespace chaosrc
