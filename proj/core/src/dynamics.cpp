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

#include "chaosrc/dynamics.hpp"

#include <sstream>

namespace chaosrc {

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::Lorenz: return "lorenz";
    case SystemKind::Rossler: return "rossler";
  }
  return "unknown";
}

std::optional<SystemKind> parse_system_kind(std::string_view name) {
  if (name == "lorenz") return SystemKind::Lorenz;
  if (name == "rossler" || name == "roessler") return SystemKind::Rossler;
  return std::nullopt;
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::Chi: return "chi";
    case Component::Psi: return "psi";
    case Component::Omega: return "omega";
  }
  return "unknown";
}

std::optional<Component> parse_component(std::string_view name) {
  if (name == "chi" || name == "x") return Component::Chi;
  if (name == "psi" || name == "y") return Component::Psi;
  if (name == "omega" || name == "z") return Component::Omega;
  return std::nullopt;
}

OdeSystem OdeSystem::lorenz(double p, double r, double b) {
  return {SystemKind::Lorenz, {p, r, b}};
}

OdeSystem OdeSystem::rossler(double a, double b, double c) {
  return {SystemKind::Rossler, {a, b, c}};
}

OdeSystem OdeSystem::defaults(SystemKind kind) {
  return kind == SystemKind::Lorenz ? lorenz() : rossler();
}

SampledSeries::SampledSeries(double si, double t0) : si_(si), t0_(t0) {
  if (!(si > 0.0) || !std::isfinite(si)) {
    throw std::invalid_argument("sampling interval must be positive and finite");
  }
}

SampledSeries::SampledSeries(double si, double t0, std::vector<Vec3> points)
    : SampledSeries(si, t0) {
  points_ = std::move(points);
}

std::vector<double> SampledSeries::component(Component c) const {
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) out[i] = value(i, c);
  return out;
}

SampledSeries SampledSeries::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > points_.size()) throw std::out_of_range("series slice out of range");
  return SampledSeries(si_, 0.0,
                       std::vector<Vec3>(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                                         points_.begin() +
                                             static_cast<std::ptrdiff_t>(begin + count)));
}

SampledSeries SampledSeries::downsample(std::size_t stride) const {
  if (stride == 0) throw std::invalid_argument("downsample stride must be positive");
  SampledSeries out(si_ * static_cast<double>(stride), t0_);
  out.reserve(points_.size() / stride + 1);
  for (std::size_t i = 0; i < points_.size(); i += stride) out.push_back(points_[i]);
  return out;
}

namespace {

std::string divergence_message(double time, double bound) {
  std::ostringstream os;
  os << "trajectory diverged at t=" << time << " (|component| > " << bound << ")";
  return os.str();
}

}  // namespace

DivergenceError::DivergenceError(double time, double bound)
    : std::runtime_error(divergence_message(time, bound)), time_(time) {}

Vec3 eval_field(const OdeSystem& system, const Vec3& r) {
  const double chi = r[0];
  const double psi = r[1];
  const double omega = r[2];
  const auto& k = system.params;
  switch (system.kind) {
    case SystemKind::Lorenz:
      return {-k[0] * chi + k[0] * psi, -chi * omega + k[1] * chi - psi,
              chi * psi - k[2] * omega};
    case SystemKind::Rossler:
      return {-psi - omega, chi + k[0] * psi, k[1] + chi * omega - k[2] * omega};
  }
  return Vec3::Zero();
}

std::size_t step_count(double duration, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("internal step must be positive");
  if (!(duration >= step * (1.0 - 1e-12))) {
    throw std::invalid_argument("duration must be at least one internal step");
  }
  return static_cast<std::size_t>(std::llround(duration / step));
}

std::vector<StatePoint> integrate(const OdeSystem& system, const StatePoint& initial,
                                  double duration, double internal_step,
                                  double blowup_bound) {
  return integrate_field([&system](const Vec3& r) { return eval_field(system, r); },
                         initial, duration, internal_step, blowup_bound);
}

std::size_t substeps_per_sample(double si, double max_internal_step) {
  if (!(si > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  if (!(max_internal_step > 0.0)) throw std::invalid_argument("internal step must be positive");
  // Tolerate representation error so that e.g. 0.005 / 0.001 gives 5, not 6.
  const double ratio = si / max_internal_step;
  const auto m = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  return std::max<std::size_t>(m, 1);
}

SampledSeries sample(const OdeSystem& system, const StatePoint& initial, double si,
                     std::size_t count, const SampleOptions& options) {
  if (count < 2) throw std::invalid_argument("sample count must be at least 2");
  if (!(options.transient >= 0.0)) throw std::invalid_argument("transient must be >= 0");

  const std::size_t substeps = substeps_per_sample(si, options.max_internal_step);
  const double h = si / static_cast<double>(substeps);
  const auto field = [&system](const Vec3& r) { return eval_field(system, r); };

  Vec3 r = initial.state();
  if (exceeds_bound(r, options.blowup_bound)) throw DivergenceError(initial.t, options.blowup_bound);

  const auto transient_steps = static_cast<std::size_t>(std::llround(options.transient / h));
  for (std::size_t i = 0; i < transient_steps; ++i) {
    r = rk4_step(field, r, h);
    if (exceeds_bound(r, options.blowup_bound)) {
      throw DivergenceError(static_cast<double>(i + 1) * h, options.blowup_bound);
    }
  }

  SampledSeries out(si, 0.0);
  out.reserve(count);
  out.push_back(r);
  for (std::size_t n = 1; n < count; ++n) {
    for (std::size_t s = 0; s < substeps; ++s) r = rk4_step(field, r, h);
    if (exceeds_bound(r, options.blowup_bound)) {
      throw DivergenceError(options.transient + static_cast<double>(n) * si,
                            options.blowup_bound);
    }
    out.push_back(r);
  }
  return out;
}

StatePoint random_initial_state(const OdeSystem& system, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  switch (system.kind) {
    case SystemKind::Lorenz: {
      const double chi = draw(-15.0, 15.0);
      const double psi = draw(-15.0, 15.0);
      const double omega = draw(10.0, 40.0);
      return {0.0, chi, psi, omega};
    }
    case SystemKind::Rossler: {
      const double chi = draw(-8.0, 8.0);
      const double psi = draw(-8.0, 8.0);
      const double omega = draw(0.0, 1.0);
      return {0.0, chi, psi, omega};
    }
  }
  return {};
}

}  // namespace chaosrc
