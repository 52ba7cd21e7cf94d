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
#include "chaosrc/model_io.hpp"

#include "gen.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

namespace chaosrc {
namespace {

double dense_radius(const SparseMatrix& w) {
  const Eigen::MatrixXd d(w);
  return Eigen::EigenSolver<Eigen::MatrixXd>(d, false).eigenvalues().cwiseAbs().maxCoeff();
}

ReservoirConfig small_config(std::size_t n, std::uint64_t seed) {
  ReservoirConfig c;
  c.nodes = n;
  c.seed = seed;
  return c;
}

Reservoir zero_reservoir(std::size_t n, double bias) {
  ReservoirConfig c = small_config(n, 0);
  SparseMatrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  return Reservoir(c, w, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), 3),
                   Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), bias));
}

SampledSeries lorenz_series(double si, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto sys = OdeSystem::lorenz();
  return sample(sys, random_initial_state(sys, rng), si, n);
}

TEST(ReservoirConfig, Defaults) {
  const ReservoirConfig c;
  EXPECT_EQ(c.nodes, 1500u);
  EXPECT_EQ(c.gain, 0.2);
  EXPECT_EQ(c.connectivity, 0.02);
  EXPECT_EQ(c.spectral_radius, 0.95);
  EXPECT_EQ(c.input_dim, 3u);
  EXPECT_EQ(c.input_weight_range, 1.0);
  EXPECT_EQ(c.bias_range, 0.3);
  EXPECT_EQ(c.nonzero_count(), 45000u);
}

TEST(ReservoirConfig, Validation) {
  auto c = small_config(20, 1);
  EXPECT_NO_THROW(c.validate());
  c.connectivity = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.connectivity = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(20, 1);
  c.spectral_radius = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(0, 1);
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(BuildReservoir, FullConnectivityIsDense) {
  auto c = small_config(10, 4);
  c.connectivity = 1.0;
  const auto r = Reservoir::build(c);
  EXPECT_EQ(r.w_esn().nonZeros(), 100);
  EXPECT_NEAR(dense_radius(r.w_esn()), 0.95, 1e-9);
}

TEST(BuildReservoir, SpectralRadiusMatchesDenseOracle) {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
    const auto r = Reservoir::build(small_config(300, seed));
    EXPECT_NEAR(dense_radius(r.w_esn()), 0.95, 1e-6) << "seed " << seed;
  }
}

TEST(BuildReservoir, DefaultSizeRadius) {
  const auto r = Reservoir::build(small_config(1500, 99));
  EXPECT_NEAR(dense_radius(r.w_esn()), 0.95, 1e-6);
  EXPECT_EQ(r.w_esn().nonZeros(), 45000);
}

TEST(BuildReservoir, DistributionsAndShapes) {
  const auto r = Reservoir::build(small_config(200, 8));
  EXPECT_EQ(r.w_in().rows(), 200);
  EXPECT_EQ(r.w_in().cols(), 3);
  EXPECT_LE(r.w_in().cwiseAbs().maxCoeff(), 1.0);
  EXPECT_LE(r.bias().cwiseAbs().maxCoeff(), 0.3);
  EXPECT_GT(r.bias().cwiseAbs().maxCoeff(), 0.2);
  EXPECT_EQ(r.w_esn().nonZeros(), 800);
  EXPECT_TRUE(r.state().isZero());
}

TEST(BuildReservoir, SeedDeterminism) {
  const auto a = Reservoir::build(small_config(100, 5));
  const auto b = Reservoir::build(small_config(100, 5));
  const auto c = Reservoir::build(small_config(100, 6));
  EXPECT_TRUE(Eigen::MatrixXd(a.w_esn()) == Eigen::MatrixXd(b.w_esn()));
  EXPECT_EQ(a.w_in(), b.w_in());
  EXPECT_EQ(a.bias(), b.bias());
  EXPECT_FALSE(Eigen::MatrixXd(a.w_esn()) == Eigen::MatrixXd(c.w_esn()));
}

TEST(SpectralRadius, SparsePathAgreesWithDense) {
  testing::for_all(5, 21, [](testing::Gen& g, std::size_t) {
    const auto n = static_cast<Eigen::Index>(g.size(80, 200));
    SparseMatrix m(n, n);
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index k = 0; k < n * n / 20; ++k) {
      t.emplace_back(static_cast<Eigen::Index>(g.size(0, n - 1)),
                     static_cast<Eigen::Index>(g.size(0, n - 1)), g.uniform(-1, 1));
    }
    m.setFromTriplets(t.begin(), t.end());
    EXPECT_NEAR(spectral_radius(m), dense_radius(m), 1e-7 * dense_radius(m));
  });
}

TEST(SpectralRadius, NilpotentIsZero) {
  SparseMatrix m(100, 100);
  std::vector<Eigen::Triplet<double>> t;
  for (int i = 0; i + 1 < 100; ++i) t.emplace_back(i, i + 1, 1.0);
  m.setFromTriplets(t.begin(), t.end());
  EXPECT_LT(spectral_radius(m), 1e-6);
}

TEST(Step, ZeroWeightsGiveZeroState) {
  auto r = zero_reservoir(6, 0.0);
  r.step(Vec3(3, -2, 7));
  EXPECT_TRUE(r.state().isZero());
}

TEST(Step, BiasOnly) {
  auto r = zero_reservoir(5, 0.3);
  r.step(Vec3(0, 0, 0));
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(r.state()[i], 0.29131, 1e-5);
  EXPECT_DOUBLE_EQ(r.state()[0], std::tanh(0.3));
}

TEST(Step, MatchesDenseFormula) {
  auto r = Reservoir::build(small_config(80, 12));
  Eigen::VectorXd x = Eigen::VectorXd::Zero(80);
  const Eigen::MatrixXd w(r.w_esn());
  testing::Gen g(4);
  for (int n = 0; n < 50; ++n) {
    const Vec3 u = g.vec3(-20, 20);
    r.step(u);
    x = (w * x + r.gain() * r.w_in() * u + r.bias()).array().tanh().matrix();
    ASSERT_LT((r.state() - x).cwiseAbs().maxCoeff(), 1e-13) << n;
  }
}

TEST(Step, StateStaysInUnitBox) {
  auto r = Reservoir::build(small_config(60, 2));
  testing::Gen g(9);
  for (int n = 0; n < 200; ++n) {
    r.step(g.vec3(-1e4, 1e4));
    ASSERT_LE(r.state().cwiseAbs().maxCoeff(), 1.0);
  }
}

TEST(Step, SaturationIsExact) {
  EXPECT_EQ(saturating_tanh(25.0), 1.0);
  EXPECT_EQ(saturating_tanh(-25.0), -1.0);
  EXPECT_LT(std::abs(saturating_tanh(20.0) - 1.0), 1e-17 + 1e-16);
  EXPECT_EQ(saturating_tanh(0.5), std::tanh(0.5));
}

TEST(Readout, Basics) {
  auto r = Reservoir::build(small_config(7, 1));
  r.step(Vec3(1, 2, 3));
  EXPECT_TRUE(readout(r, Readout(Eigen::MatrixXd::Zero(7, 3), 0.01)).isZero());

  Eigen::MatrixXd w = testing::Gen(2).matrix(7, 3);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(7);
  e1[0] = 1.0;
  r.set_state(e1);
  EXPECT_EQ(readout(r, Readout(w, 0.01)), Eigen::VectorXd(w.row(0).transpose()));
}

TEST(Readout, MatchesDotProducts) {
  testing::for_all(50, 3, [](testing::Gen& g, std::size_t) {
    const auto n = static_cast<Eigen::Index>(g.size(1, 40));
    const Eigen::MatrixXd w = g.matrix(n, 3, -5, 5);
    const Eigen::VectorXd x = g.matrix(n, 1);
    const Eigen::VectorXd y = Readout(w, 0.01).apply(x);
    for (Eigen::Index m = 0; m < 3; ++m) {
      double dot = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) dot += x[i] * w(i, m);
      EXPECT_NEAR(y[m], dot, 1e-12);
    }
  });
}

TEST(Readout, RejectsBadArguments) {
  EXPECT_THROW(Readout(Eigen::MatrixXd::Zero(4, 3), 0.0), std::invalid_argument);
  EXPECT_THROW(Readout(Eigen::MatrixXd::Zero(4, 3), -1.0), std::invalid_argument);
  const Readout ro(Eigen::MatrixXd::Zero(4, 3), 0.01);
  EXPECT_THROW((void)ro.apply(Eigen::VectorXd::Zero(5)), std::invalid_argument);
}

TEST(Harvest, FullScaleRowCount) {
  auto r = Reservoir::build(small_config(10, 1));
  const auto s = lorenz_series(0.01, 20000, 1);
  const Harvest h = harvest(r, s, 3000);
  EXPECT_EQ(h.states.rows(), 16999);
  EXPECT_EQ(h.states.cols(), 10);
  EXPECT_EQ(h.targets.rows(), 16999);
  EXPECT_EQ(h.targets.cols(), 3);
}

TEST(Harvest, MinimalAndTooShort) {
  auto r = Reservoir::build(small_config(10, 1));
  const auto s = lorenz_series(0.01, 2, 1);
  EXPECT_EQ(harvest(r, s, 0).states.rows(), 1);
  r.reset();
  EXPECT_THROW(harvest(r, s, 1), std::invalid_argument);
}

TEST(Harvest, AlignmentAgainstManualStepping) {
  auto r = Reservoir::build(small_config(30, 3));
  const auto s = lorenz_series(0.02, 60, 2);
  const std::size_t buffer = 10;
  const Harvest h = harvest(r, s, buffer);
  ASSERT_EQ(h.states.rows(), static_cast<Eigen::Index>(s.size() - 1 - buffer));

  auto m = Reservoir::build(small_config(30, 3));
  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    m.step(s.state(n));
    if (n >= buffer) {
      const auto row = static_cast<Eigen::Index>(n - buffer);
      EXPECT_EQ(Eigen::VectorXd(h.states.row(row).transpose()), m.state());
      EXPECT_EQ(Vec3(h.targets.row(row).transpose()), s.state(n + 1));
    }
  }
}

TEST(Harvest, ReplayFromZeroIsIdentical) {
  auto r = Reservoir::build(small_config(25, 3));
  const auto s = lorenz_series(0.02, 300, 2);
  const Harvest a = harvest(r, s, 50);
  r.reset();
  const Harvest b = harvest(r, s, 50);
  EXPECT_EQ(a.states, b.states);
}

Eigen::MatrixXd explicit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double alpha) {
  const Eigen::MatrixXd a =
      x.transpose() * x + alpha * Eigen::MatrixXd::Identity(x.cols(), x.cols());
  return a.inverse() * x.transpose() * y;
}

TEST(Train, IdentityDesign) {
  const Eigen::MatrixXd t = testing::Gen(1).matrix(12, 3, -3, 3);
  const Readout ro = train(Eigen::MatrixXd::Identity(12, 12), t, 1e-12);
  EXPECT_LT((ro.w_out() - t).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Train, MatchesExplicitInverse) {
  testing::for_all(30, 17, [](testing::Gen& g, std::size_t) {
    const Eigen::MatrixXd x = g.matrix(50, 8);
    const Eigen::MatrixXd y = g.matrix(50, 3, -10, 10);
    const Readout ro = train(x, y, 0.01);
    EXPECT_LT((ro.w_out() - explicit_ridge(x, y, 0.01)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(ro.ridge_alpha(), 0.01);
  });
}

TEST(Train, RankDeficientStaysFinite) {
  Eigen::MatrixXd x = testing::Gen(5).matrix(40, 6);
  x.col(3) = x.col(1);
  x.col(5) = x.col(1);
  const Eigen::MatrixXd y = testing::Gen(6).matrix(40, 3);
  const Readout ro = train(x, y, 0.01);
  EXPECT_TRUE(ro.w_out().allFinite());
  EXPECT_NEAR(ro.w_out()(1, 0), ro.w_out()(3, 0), 1e-10);
}

TEST(Train, GradientVanishes) {
  testing::for_all(20, 23, [](testing::Gen& g, std::size_t) {
    const auto k = static_cast<Eigen::Index>(g.size(20, 200));
    const auto n = static_cast<Eigen::Index>(g.size(2, 30));
    const Eigen::MatrixXd x = g.matrix(k, n);
    const Eigen::MatrixXd y = g.matrix(k, 3, -20, 20);
    const double alpha = std::pow(10.0, g.uniform(-4, 1));
    const Eigen::MatrixXd w = train(x, y, alpha).w_out();
    const Eigen::MatrixXd xty = x.transpose() * y;
    const Eigen::MatrixXd grad = 2 * x.transpose() * x * w - 2 * xty + 2 * alpha * w;
    EXPECT_LT(grad.cwiseAbs().maxCoeff(), 1e-6 * xty.cwiseAbs().maxCoeff());
  });
}

TEST(Train, RejectsBadArguments) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(5, 2);
  EXPECT_THROW(train(x, Eigen::MatrixXd::Ones(4, 3), 0.01), std::invalid_argument);
  EXPECT_THROW(train(x, Eigen::MatrixXd::Ones(5, 3), 0.0), std::invalid_argument);
}

TEST(RidgeAccumulator, StreamingEqualsBatch) {
  testing::Gen g(31);
  const Eigen::MatrixXd x = g.matrix(203, 17);
  const Eigen::MatrixXd y = g.matrix(203, 3);
  RidgeAccumulator acc(17, 3, 7);
  for (Eigen::Index i = 0; i < 100; ++i) acc.add(x.row(i).transpose(), y.row(i).transpose());
  acc.add_rows(x.bottomRows(103), y.bottomRows(103));
  EXPECT_EQ(acc.rows(), 203u);
  const Readout a = acc.solve(0.01);
  EXPECT_LT((a.w_out() - explicit_ridge(x, y, 0.01)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FitReadout, EqualsHarvestThenTrain) {
  const auto s = lorenz_series(0.05, 800, 4);
  auto a = Reservoir::build(small_config(40, 4));
  auto b = Reservoir::build(small_config(40, 4));
  const Readout ra = fit_readout(a, s, 100, 0.01);
  const Harvest h = harvest(b, s, 100);
  const Readout rb = train(h.states, h.targets, 0.01);
  EXPECT_LT((ra.w_out() - rb.w_out()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(a.state(), b.state());
}

TEST(FitReadout, Reproducible) {
  const auto s = lorenz_series(0.05, 800, 4);
  auto a = Reservoir::build(small_config(40, 4));
  auto b = Reservoir::build(small_config(40, 4));
  EXPECT_EQ(fit_readout(a, s, 100, 0.01).w_out(), fit_readout(b, s, 100, 0.01).w_out());
}

TEST(FitReadout, OneStepErrorSmallInGoodWindow) {
  const double si = 0.05;
  auto r = Reservoir::build(small_config(300, 7));
  const Readout ro = fit_readout(r, lorenz_series(si, 3000, 70), 500, 0.01);
  const auto held = lorenz_series(si, 2000, 71);
  r.reset();
  const Harvest h = harvest(r, held, 500);
  const Eigen::MatrixXd pred = h.states * ro.w_out();
  for (Eigen::Index c = 0; c < 3; ++c) {
    const Eigen::VectorXd t = h.targets.col(c);
    const double var = (t.array() - t.mean()).square().mean();
    const double mse = (pred.col(c) - t).squaredNorm() / static_cast<double>(t.size());
    EXPECT_LT(mse, 0.01 * var) << "component " << c;
  }
}

TEST(Autonomous, ConstantFixedPoint) {
  const Vec3 c(1.5, -0.5, 2.0);
  const SampledSeries flat(0.01, 0.0, std::vector<Vec3>(300, c));
  auto r = Reservoir::build(small_config(50, 5));
  const Readout ro = fit_readout(r, flat, 50, 1e-8);
  const auto run = run_autonomous(r, ro, flat.slice(0, 60), 100);
  ASSERT_FALSE(run.diverged);
  ASSERT_EQ(run.output.size(), 100u);
  for (const auto& y : run.output.points()) EXPECT_LT((y - c).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Autonomous, ZeroStepsAndEmptyWarmup) {
  auto r = Reservoir::build(small_config(20, 5));
  const auto s = lorenz_series(0.02, 100, 5);
  const Readout ro = fit_readout(r, s, 10, 0.01);
  const auto run = run_autonomous(r, ro, s.slice(0, 10), 0);
  EXPECT_TRUE(run.output.empty());
  EXPECT_DOUBLE_EQ(run.output.si(), 0.02);
  EXPECT_THROW(run_autonomous(r, ro, SampledSeries(0.02), 5), std::invalid_argument);
}

TEST(Autonomous, FirstOutputPredictsAfterWarmup) {
  auto r = Reservoir::build(small_config(20, 5));
  const auto s = lorenz_series(0.02, 100, 5);
  const Readout ro = fit_readout(r, s, 10, 0.01);
  const auto run = run_autonomous(r, ro, s.slice(0, 30), 3);

  auto m = Reservoir::build(small_config(20, 5));
  for (std::size_t n = 0; n < 30; ++n) m.step(s.state(n));
  Vec3 y = ro.apply(m.state());
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(run.output.state(k), y);
    m.step(y);
    y = ro.apply(m.state());
  }
}

TEST(Autonomous, DivergenceIsFlagged) {
  auto r = zero_reservoir(4, 0.3);
  const Readout ro(Eigen::MatrixXd::Constant(4, 3, 1e7), 0.01);
  const SampledSeries warm(0.01, 0.0, {Vec3(0, 0, 0)});
  const auto run = run_autonomous(r, ro, warm, 50);
  EXPECT_TRUE(run.diverged);
  EXPECT_LT(run.output.size(), 50u);
  EXPECT_EQ(run.divergence_step, run.output.size());
}

TEST(Autonomous, LorenzTracksThenStaysBounded) {
  const double si = 0.05;
  auto cfg = small_config(500, 11);
  auto r = Reservoir::build(cfg);
  const Readout ro = fit_readout(r, lorenz_series(si, 5000, 110), 1000, 0.01);
  const auto eval = lorenz_series(si, 3000, 111);
  const auto run = run_autonomous(r, ro, eval.slice(0, 1000), 2000);
  ASSERT_FALSE(run.diverged);
  for (std::size_t k = 0; k < 10; ++k) {
    EXPECT_LT((run.output.state(k) - eval.state(1000 + k)).norm(), 1.0) << k;
  }
  for (const auto& y : run.output.points()) {
    ASSERT_LT(y.cwiseAbs().maxCoeff(), 80.0);
  }
  EXPECT_LE(r.state().cwiseAbs().maxCoeff(), 1.0);
}

TEST(ModelIo, RoundTripReproducesRun) {
  auto r = Reservoir::build(small_config(40, 8));
  const auto s = lorenz_series(0.05, 600, 8);
  const Readout ro = fit_readout(r, s, 100, 0.01);
  r.reset();
  const ModelFile model{r, ro, 0.05, 100, OdeSystem::lorenz()};
  const auto path = std::filesystem::temp_directory_path() / "chaosrc_model_test.json";
  save_model(path, model);
  ModelFile back = load_model(path);
  std::filesystem::remove(path);
  EXPECT_TRUE(Eigen::MatrixXd(back.reservoir.w_esn()) == Eigen::MatrixXd(r.w_esn()));
  EXPECT_EQ(back.reservoir.w_in(), r.w_in());
  EXPECT_EQ(back.reservoir.bias(), r.bias());
  EXPECT_EQ(back.reservoir.config(), r.config());
  ASSERT_TRUE(back.readout);
  EXPECT_EQ(back.readout->w_out(), ro.w_out());
  EXPECT_EQ(back.si, 0.05);
  EXPECT_EQ(back.buffer, 100u);

  const auto a = run_autonomous(r, ro, s.slice(0, 100), 50);
  const auto b = run_autonomous(back.reservoir, *back.readout, s.slice(0, 100), 50);
  EXPECT_EQ(a.output.points(), b.output.points());
}

TEST(ModelIo, RejectsGarbage) {
  EXPECT_THROW(model_from_json("{}"), std::exception);
  EXPECT_THROW(model_from_json("not json"), std::exception);
}

}  // namespace
}  // namespace chaosrc
