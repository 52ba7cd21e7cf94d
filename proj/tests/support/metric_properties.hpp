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

// Randomized invariant checks on the metric functions. Each check returns a
// description of the first violation, or an empty string.

#include "chaosrc/metrics.hpp"

#include "gen.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace chaosrc::testing {

struct PropertyReport {
  std::string name;
  std::size_t cases = 0;
  std::string failure;

  bool ok() const { return failure.empty(); }
};

template <class Check>
PropertyReport check_property(std::string name, std::size_t cases, std::uint64_t seed,
                              Check&& check) {
  PropertyReport r{std::move(name), 0, {}};
  for (std::size_t i = 0; i < cases && r.ok(); ++i) {
    Gen g(seed * 0x9e3779b97f4a7c15ULL + i);
    r.failure = check(g);
    ++r.cases;
    if (!r.ok()) r.failure = "case " + std::to_string(i) + ": " + r.failure;
  }
  return r;
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

inline DensityGrid random_density(Gen& g, const GridSpec& spec) {
  return density(g.cloud(g.size(1, 3000)), spec);
}

inline GridSpec random_grid(Gen& g, const SampledSeries& ref) {
  return GridSpec::covering(ref, g.size(1, 24), g.uniform(0.0, 0.2), g.coin(0.2) ? 0.0 : 1e-8);
}

inline std::string density_sums_to_one(Gen& g) {
  const auto ref = g.cloud(g.size(1, 2000));
  const auto d = density(g.coin() ? ref : g.cloud(g.size(1, 2000)), random_grid(g, ref));
  double sum = 0.0;
  for (double r : d.rho) {
    if (r < 0.0) return "negative cell";
    if (d.spec.epsilon > 0.0 && !(r > 0.0)) return "empty cell despite epsilon";
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) return "sum " + fmt(sum);
  return {};
}

inline std::string kld_nonnegative(Gen& g) {
  const auto ref = g.cloud(g.size(2, 2000));
  GridSpec spec = random_grid(g, ref);
  spec.epsilon = 1e-8;
  const auto p = random_density(g, spec);
  const auto q = random_density(g, spec);
  const double pq = kl_divergence(p, q);
  if (!(pq >= 0.0)) return "KLD(p||q) = " + fmt(pq);
  if (kl_divergence(p, p) != 0.0) return "KLD(p||p) = " + fmt(kl_divergence(p, p));
  return {};
}

inline std::string l1_bounds(Gen& g) {
  const auto ref = g.cloud(g.size(2, 2000));
  const GridSpec spec = random_grid(g, ref);
  const auto a = random_density(g, spec);
  const auto b = random_density(g, spec);
  const double ab = l1_distance(a, b);
  if (!(ab >= 0.0 && ab <= 2.0 + 1e-12)) return "L1 = " + fmt(ab);
  if (l1_distance(a, a) != 0.0) return "L1(a,a) != 0";
  if (ab != l1_distance(b, a)) return "L1 not symmetric";
  return {};
}

inline std::string ip_bounded(Gen& g) {
  const auto sys = g.coin() ? OdeSystem::lorenz() : OdeSystem::rossler();
  const auto s = g.walk(g.size(2, 500), 0.01, g.uniform(1e-6, 50.0), g.uniform(0.0, 0.3));
  const auto ip = inner_product(s, sys);
  if (!(std::abs(ip.value) <= 1.0)) return "IP = " + fmt(ip.value);
  if (ip.valid_steps + ip.duplicate_steps + ip.fixed_point_steps != s.size() - 1) {
    return "step accounting";
  }
  return {};
}

inline std::string ip_true_trajectory(Gen& g) {
  const auto sys = g.coin() ? OdeSystem::lorenz() : OdeSystem::rossler();
  const auto s = sample(sys, random_initial_state(sys, g.engine()), 0.005, g.size(500, 3000));
  const double ip = inner_product(s, sys).value;
  if (!(ip > 0.999)) return std::string(sys.name()) + " IP = " + fmt(ip);
  return {};
}

inline std::string mph_monotone(Gen& g) {
  const auto curve = g.curve(g.size(1, 400), g.uniform(0.1, 3.0));
  const double si = g.uniform(0.001, 0.5);
  double h1 = g.uniform(0.01, 2.0), h2 = g.uniform(0.01, 2.0);
  if (h1 > h2) std::swap(h1, h2);
  const double a = mph(curve, h1, si).horizon;
  const double b = mph(curve, h2, si).horizon;
  if (a > b) return "MPH(" + fmt(h1) + ")=" + fmt(a) + " > MPH(" + fmt(h2) + ")=" + fmt(b);
  return {};
}

inline std::string parseval(Gen& g) {
  const std::size_t n = g.size(2, 5000);
  std::vector<double> x(n);
  const double scale = std::pow(10.0, g.uniform(-6, 6));
  const double offset = g.uniform(-100, 100) * scale;
  for (auto& v : x) v = offset + scale * g.uniform(-1, 1);
  const auto sp = amplitude_spectrum(x, g.uniform(0.001, 1.0));
  const std::size_t k = floor_power_of_two(n);
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += x[i];
  mean /= static_cast<double>(k);
  double energy = 0.0, total = 0.0;
  for (std::size_t i = 0; i < k; ++i) energy += (x[i] - mean) * (x[i] - mean);
  for (double a : sp.amplitude) total += a * a;
  if (std::abs(total - energy) > 1e-6 * energy) {
    return "energy " + fmt(energy) + " vs " + fmt(total);
  }
  return {};
}

}  // namespace chaosrc::testing
