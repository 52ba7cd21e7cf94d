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

#include "chaosrc/esn.hpp"
#include "chaosrc/metrics.hpp"

#include "gen.hpp"
#include "metric_properties.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace chaosrc {
namespace {

using testing::check_property;

#define EXPECT_PROPERTY(report)                       \
  do {                                                \
    const auto r_ = (report);                         \
    EXPECT_TRUE(r_.ok()) << r_.name << ": " << r_.failure; \
  } while (0)

TEST(MetricProperties, DensityNormalization) {
  EXPECT_PROPERTY(check_property("density", 300, 1, testing::density_sums_to_one));
}

TEST(MetricProperties, KldNonNegative) {
  EXPECT_PROPERTY(check_property("kld", 200, 2, testing::kld_nonnegative));
}

TEST(MetricProperties, L1Bounds) {
  EXPECT_PROPERTY(check_property("l1", 200, 3, testing::l1_bounds));
}

TEST(MetricProperties, InnerProductBounded) {
  EXPECT_PROPERTY(check_property("ip", 300, 4, testing::ip_bounded));
}

TEST(MetricProperties, InnerProductOfTrueTrajectory) {
  EXPECT_PROPERTY(check_property("ip_true", 10, 5, testing::ip_true_trajectory));
}

TEST(MetricProperties, MphMonotoneInThreshold) {
  EXPECT_PROPERTY(check_property("mph", 2000, 6, testing::mph_monotone));
}

TEST(MetricProperties, Parseval) {
  EXPECT_PROPERTY(check_property("parseval", 200, 7, testing::parseval));
}

// Direct-summation oracles on small instances.

std::vector<double> naive_density(const SampledSeries& s, const GridSpec& g) {
  std::vector<double> m(g.cells(), 0.0);
  for (const auto& r : s.points()) {
    std::size_t idx[3];
    for (int d = 0; d < 3; ++d) {
      const double lo = g.bounds[d].first, hi = g.bounds[d].second;
      const double x = std::clamp(r[d], lo, hi);
      auto i = static_cast<long>(std::floor((x - lo) / (hi - lo) * g.resolution));
      idx[d] = static_cast<std::size_t>(std::clamp<long>(i, 0, static_cast<long>(g.resolution) - 1));
    }
    m[(idx[0] * g.resolution + idx[1]) * g.resolution + idx[2]] += 1.0;
  }
  double z = 0.0;
  for (auto& v : m) {
    v = v / static_cast<double>(s.size()) + g.epsilon;
    z += v;
  }
  for (auto& v : m) v /= z;
  return m;
}

TEST(MetricOracles, SmallInstances) {
  testing::for_all(200, 9, [](testing::Gen& g, std::size_t) {
    const std::size_t n = g.size(2, 100);
    const auto real = g.walk(n, 0.01, g.uniform(0.1, 3.0));
    const auto aut = g.walk(n, 0.01, g.uniform(0.1, 3.0));
    const auto spec = GridSpec::covering(real, g.size(1, 6), 0.05, 1e-8);

    const auto dr = density(real, spec);
    const auto da = density(aut, spec);
    const auto nr = naive_density(real, spec);
    const auto na = naive_density(aut, spec);
    double l1 = 0.0, kra = 0.0, kar = 0.0;
    for (std::size_t l = 0; l < nr.size(); ++l) {
      ASSERT_NEAR(dr.rho[l], nr[l], 1e-12);
      ASSERT_NEAR(da.rho[l], na[l], 1e-12);
      l1 += std::abs(na[l] - nr[l]);
      kra += nr[l] * std::log(nr[l] / na[l]);
      kar += na[l] * std::log(na[l] / nr[l]);
    }
    EXPECT_NEAR(l1_distance(da, dr), l1, 1e-10);
    EXPECT_NEAR(kl_divergence(dr, da), kra, 1e-10 * std::max(1.0, kra));
    EXPECT_NEAR(kl_divergence(da, dr), kar, 1e-10 * std::max(1.0, kar));

    const auto sys = OdeSystem::lorenz();
    double ip = 0.0;
    std::size_t valid = 0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const Vec3 f = eval_field(sys, aut.state(j));
      const Vec3 d = aut.state(j + 1) - aut.state(j);
      ip += f.dot(d) / (f.norm() * d.norm());
      ++valid;
    }
    EXPECT_NEAR(inner_product(aut, sys).value, ip / static_cast<double>(valid), 1e-10);

    double ts = 0.0;
    for (auto c : kComponents) {
      const auto rc = real.component(c);
      double mean = 0.0;
      for (double v : rc) mean += v / static_cast<double>(n);
      double var = 0.0;
      for (double v : rc) var += (v - mean) * (v - mean) / static_cast<double>(n);
      for (std::size_t t = 0; t < n; ++t) {
        const double e = rc[t] - aut.value(t, c);
        ts += e * e / var;
      }
    }
    EXPECT_NEAR(trial_score(real, aut), ts, 1e-10 * std::max(1.0, ts));
  });
}

TEST(MetricOracles, EnsembleNmse) {
  testing::for_all(100, 10, [](testing::Gen& g, std::size_t) {
    const std::size_t trials = g.size(2, 8), n = g.size(1, 50);
    EnsemblePair e;
    for (std::size_t i = 0; i < trials; ++i) {
      e.real.push_back(g.walk(n, 0.02));
      e.autos.push_back(g.walk(n, 0.02));
    }
    for (auto c : kComponents) {
      const auto curve = nmse_curve(e, c);
      for (std::size_t t = 0; t < n; ++t) {
        double mean = 0.0;
        for (const auto& r : e.real) mean += r.value(t, c) / static_cast<double>(trials);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < trials; ++i) {
          num += std::pow(e.real[i].value(t, c) - e.autos[i].value(t, c), 2);
          den += std::pow(e.real[i].value(t, c) - mean, 2);
        }
        ASSERT_NEAR(curve[t], num / den, 1e-10 * std::max(1.0, num / den));
      }
    }
  });
}

TEST(ReservoirProperties, StatesStayBoundedUnderAnyDrive) {
  testing::for_all(10, 12, [](testing::Gen& g, std::size_t) {
    ReservoirConfig c;
    c.nodes = g.size(5, 120);
    c.connectivity = g.uniform(0.01, 1.0);
    c.gain = g.uniform(0.0, 5.0);
    c.seed = g.size(0, 1u << 30);
    auto r = Reservoir::build(c);
    for (int n = 0; n < 100; ++n) {
      r.step(g.vec3(-1e6, 1e6));
      ASSERT_LE(r.state().cwiseAbs().maxCoeff(), 1.0);
      ASSERT_TRUE(r.state().allFinite());
    }
  });
}

}  // namespace
}  // namespace chaosrc
