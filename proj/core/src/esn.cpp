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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_set>

namespace chaosrc {

namespace {

constexpr int kMaxSeedRetries = 64;
constexpr double kZeroRadius = 1e-12;

double dense_spectral_radius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Floyd's algorithm: `count` distinct values from [0, universe), sorted.
std::vector<std::uint64_t> sample_positions(std::uint64_t universe, std::uint64_t count,
                                            std::mt19937_64& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(count * 2);
  for (std::uint64_t j = universe - count; j < universe; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    const std::uint64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void ReservoirConfig::validate() const {
  if (nodes == 0) throw std::invalid_argument("reservoir needs at least one node");
  if (!(connectivity > 0.0 && connectivity <= 1.0)) {
    throw std::invalid_argument("connectivity must lie in (0, 1]");
  }
  if (!(spectral_radius > 0.0)) throw std::invalid_argument("spectral radius must be positive");
  if (input_dim == 0) throw std::invalid_argument("input dimension must be positive");
  if (!(input_weight_range >= 0.0)) throw std::invalid_argument("input weight range must be >= 0");
  if (!(bias_range >= 0.0)) throw std::invalid_argument("bias range must be >= 0");
  if (!std::isfinite(gain)) throw std::invalid_argument("gain must be finite");
}

std::size_t ReservoirConfig::nonzero_count() const {
  const double total = static_cast<double>(nodes) * static_cast<double>(nodes);
  const auto n = static_cast<std::size_t>(std::llround(connectivity * total));
  return std::clamp<std::size_t>(n, 1, nodes * nodes);
}

double spectral_radius(const SparseMatrix& matrix, const SpectralRadiusOptions& options) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n) throw std::invalid_argument("spectral radius needs a square matrix");
  if (n == 0 || matrix.nonZeros() == 0) return 0.0;
  if (n <= options.dense_threshold) return dense_spectral_radius(Eigen::MatrixXd(matrix));

  const Eigen::Index width = std::min<Eigen::Index>(std::max(options.block_size, 1), n);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd q(n, width);
  for (Eigen::Index j = 0; j < width; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = normal(rng);
  }
  const Eigen::MatrixXd thin = Eigen::MatrixXd::Identity(n, width);
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * thin;

  double previous = -1.0;
  double estimate = 0.0;
  Eigen::MatrixXd z(n, width);
  for (int it = 1; it <= options.max_iterations; ++it) {
    z.noalias() = matrix * q;
    if (it % options.check_every == 0 || it == options.max_iterations) {
      const Eigen::MatrixXd projected = q.transpose() * z;
      estimate = dense_spectral_radius(projected);
      if (std::abs(estimate - previous) <= options.tolerance * std::max(estimate, kZeroRadius)) {
        return estimate;
      }
      previous = estimate;
    }
    if (z.norm() == 0.0) return 0.0;  // nilpotent
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * thin;
  }
  return estimate;
}

Reservoir::Reservoir(ReservoirConfig config, SparseMatrix w_esn, Eigen::MatrixXd w_in,
                     Eigen::VectorXd bias)
    : config_(config),
      w_esn_(std::move(w_esn)),
      w_in_(std::move(w_in)),
      bias_(std::move(bias)) {
  config_.validate();
  const auto n = static_cast<Eigen::Index>(config_.nodes);
  const auto u = static_cast<Eigen::Index>(config_.input_dim);
  if (w_esn_.rows() != n || w_esn_.cols() != n) throw std::invalid_argument("W_esn must be N x N");
  if (w_in_.rows() != n || w_in_.cols() != u) throw std::invalid_argument("W_in must be N x U");
  if (bias_.size() != n) throw std::invalid_argument("bias must have N entries");
  w_esn_.makeCompressed();
  state_ = Eigen::VectorXd::Zero(n);
  scratch_ = Eigen::VectorXd::Zero(n);
}

Reservoir Reservoir::build(const ReservoirConfig& config) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.nodes);
  const auto u = static_cast<Eigen::Index>(config.input_dim);
  const std::uint64_t universe = static_cast<std::uint64_t>(config.nodes) * config.nodes;
  const std::size_t nnz = config.nonzero_count();

  for (int attempt = 0; attempt < kMaxSeedRetries; ++attempt) {
    const std::uint64_t stream =
        attempt == 0 ? config.seed : splitmix64(config.seed ^ splitmix64(attempt));
    std::mt19937_64 rng(stream);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    const auto positions = sample_positions(universe, nnz, rng);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(positions.size());
    for (const auto pos : positions) {
      const auto row = static_cast<Eigen::Index>(pos / config.nodes);
      const auto col = static_cast<Eigen::Index>(pos % config.nodes);
      triplets.emplace_back(row, col, unit(rng));
    }
    SparseMatrix w_esn(n, n);
    w_esn.setFromTriplets(triplets.begin(), triplets.end());

    const double radius = spectral_radius(w_esn);
    if (!(radius > kZeroRadius)) continue;
    w_esn *= config.spectral_radius / radius;

    Eigen::MatrixXd w_in(n, u);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < u; ++j) w_in(i, j) = config.input_weight_range * unit(rng);
    }
    Eigen::VectorXd bias(n);
    for (Eigen::Index i = 0; i < n; ++i) bias[i] = config.bias_range * unit(rng);

    Reservoir res(config, std::move(w_esn), std::move(w_in), std::move(bias));
    res.seed_retries_ = attempt;
    return res;
  }
  throw std::runtime_error("could not draw a recurrent matrix with nonzero spectral radius");
}

void Reservoir::update(const Eigen::VectorXd& drive) {
  scratch_.noalias() = w_esn_ * state_;
  scratch_ += drive;
  scratch_ += bias_;
  state_ = scratch_.unaryExpr([](double a) { return saturating_tanh(a); });
}

void Reservoir::step(const Eigen::Ref<const Eigen::VectorXd>& u) {
  if (u.size() != w_in_.cols()) throw std::invalid_argument("input has wrong dimension");
  update(config_.gain * (w_in_ * u));
}

void Reservoir::step(const Vec3& u) {
  if (w_in_.cols() != 3) throw std::invalid_argument("input has wrong dimension");
  update(config_.gain * (w_in_ * u));
}

void Reservoir::set_state(const Eigen::VectorXd& x) {
  if (x.size() != state_.size()) throw std::invalid_argument("state has wrong dimension");
  state_ = x;
}

Readout::Readout(Eigen::MatrixXd w_out, double ridge_alpha)
    : w_out_(std::move(w_out)), ridge_alpha_(ridge_alpha) {
  if (!(ridge_alpha_ > 0.0)) throw std::invalid_argument("ridge alpha must be positive");
}

Eigen::VectorXd Readout::apply(const Eigen::Ref<const Eigen::VectorXd>& state) const {
  if (state.size() != w_out_.rows()) throw std::invalid_argument("readout size mismatch");
  return w_out_.transpose() * state;
}

Eigen::VectorXd readout(const Reservoir& reservoir, const Readout& ro) {
  return ro.apply(reservoir.state());
}

Harvest harvest(Reservoir& reservoir, const SampledSeries& series, std::size_t k_buffer) {
  const std::size_t k = series.size();
  if (k < k_buffer + 2) throw std::invalid_argument("series too short for the buffer length");
  const std::size_t rows = k - 1 - k_buffer;
  const auto n = static_cast<Eigen::Index>(reservoir.size());

  Harvest out;
  out.states.resize(static_cast<Eigen::Index>(rows), n);
  out.targets.resize(static_cast<Eigen::Index>(rows), 3);
  reservoir.reset();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    reservoir.step(series.state(i));
    if (i >= k_buffer) {
      const auto r = static_cast<Eigen::Index>(i - k_buffer);
      out.states.row(r) = reservoir.state().transpose();
      out.targets.row(r) = series.state(i + 1).transpose();
    }
  }
  return out;
}

RidgeAccumulator::RidgeAccumulator(std::size_t features, std::size_t outputs,
                                   std::size_t block_rows)
    : gram_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(features),
                                  static_cast<Eigen::Index>(features))),
      cross_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(features),
                                   static_cast<Eigen::Index>(outputs))),
      block_states_(static_cast<Eigen::Index>(features),
                    static_cast<Eigen::Index>(std::max<std::size_t>(block_rows, 1))),
      block_targets_(static_cast<Eigen::Index>(outputs),
                     static_cast<Eigen::Index>(std::max<std::size_t>(block_rows, 1))) {}

void RidgeAccumulator::add(const Eigen::Ref<const Eigen::VectorXd>& state,
                           const Eigen::Ref<const Eigen::VectorXd>& target) {
  if (state.size() != gram_.rows() || target.size() != cross_.cols()) {
    throw std::invalid_argument("ridge row has wrong dimension");
  }
  const auto col = static_cast<Eigen::Index>(block_fill_);
  block_states_.col(col) = state;
  block_targets_.col(col) = target;
  ++rows_;
  if (++block_fill_ == static_cast<std::size_t>(block_states_.cols())) flush();
}

void RidgeAccumulator::add_rows(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                const Eigen::Ref<const Eigen::MatrixXd>& targets) {
  if (states.rows() != targets.rows()) throw std::invalid_argument("row counts differ");
  for (Eigen::Index i = 0; i < states.rows(); ++i) {
    add(states.row(i).transpose(), targets.row(i).transpose());
  }
}

void RidgeAccumulator::flush() {
  if (block_fill_ == 0) return;
  const auto m = static_cast<Eigen::Index>(block_fill_);
  const auto s = block_states_.leftCols(m);
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(s);
  cross_.noalias() += s * block_targets_.leftCols(m).transpose();
  block_fill_ = 0;
}

Readout RidgeAccumulator::solve(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("ridge alpha must be positive");
  flush();
  Eigen::MatrixXd regularized = gram_;
  regularized.diagonal().array() += alpha;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(regularized);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("regularized Gram matrix is not positive definite");
  }
  Eigen::MatrixXd w = llt.solve(cross_);
  if (!w.allFinite()) throw std::runtime_error("ridge solve produced non-finite weights");
  return Readout(std::move(w), alpha);
}

Readout train(const Eigen::Ref<const Eigen::MatrixXd>& states,
              const Eigen::Ref<const Eigen::MatrixXd>& targets, double alpha) {
  if (states.rows() != targets.rows()) throw std::invalid_argument("row counts differ");
  RidgeAccumulator acc(static_cast<std::size_t>(states.cols()),
                       static_cast<std::size_t>(targets.cols()));
  acc.add_rows(states, targets);
  return acc.solve(alpha);
}

Readout fit_readout(Reservoir& reservoir, const SampledSeries& series, std::size_t k_buffer,
                    double alpha) {
  const std::size_t k = series.size();
  if (k < k_buffer + 2) throw std::invalid_argument("series too short for the buffer length");
  RidgeAccumulator acc(reservoir.size(), 3);
  reservoir.reset();
  for (std::size_t i = 0; i + 1 < k; ++i) {
    reservoir.step(series.state(i));
    if (i >= k_buffer) acc.add(reservoir.state(), series.state(i + 1));
  }
  return acc.solve(alpha);
}

AutonomousRun run_autonomous(Reservoir& reservoir, const Readout& ro,
                             const SampledSeries& warmup, std::size_t steps,
                             double blowup_bound) {
  if (warmup.empty()) throw std::invalid_argument("warmup series must not be empty");
  if (ro.inputs() != reservoir.size() || ro.outputs() != 3) {
    throw std::invalid_argument("readout does not match the reservoir");
  }
  AutonomousRun run{SampledSeries(warmup.si(), 0.0), false, 0};
  reservoir.reset();
  for (std::size_t i = 0; i < warmup.size(); ++i) reservoir.step(warmup.state(i));

  run.output.reserve(steps);
  Vec3 y = Vec3::Zero();
  for (std::size_t n = 0; n < steps; ++n) {
    if (n > 0) reservoir.step(y);
    y = ro.apply(reservoir.state());
    if (exceeds_bound(y, blowup_bound)) {
      run.diverged = true;
      run.divergence_step = n;
      break;
    }
    run.output.push_back(y);
  }
  return run;
}

}  // namespace chaosrc
