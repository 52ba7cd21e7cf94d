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

// Echo state network: sparse random reservoir, ridge-regression readout and
// closed-loop generation.

#include "chaosrc/dynamics.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>

namespace chaosrc {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct ReservoirConfig {
  std::size_t nodes = 1500;
  double gain = 0.2;
  double connectivity = 0.02;
  double spectral_radius = 0.95;
  std::size_t input_dim = 3;
  /// Input weights are drawn from U[-input_weight_range, input_weight_range].
  double input_weight_range = 1.0;
  /// Biases are drawn from U[-bias_range, bias_range].
  double bias_range = 0.3;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;

  /// Number of nonzero recurrent weights, round(connectivity * N^2), at least 1.
  std::size_t nonzero_count() const;

  friend bool operator==(const ReservoirConfig&, const ReservoirConfig&) = default;
};

struct SpectralRadiusOptions {
  int max_iterations = 10000;
  double tolerance = 1e-9;
  /// Width of the iterated block. A block wider than one resolves complex
  /// conjugate pairs and clustered moduli at the spectral edge.
  int block_size = 24;
  int check_every = 5;
  /// Matrices up to this size are handled by a dense eigen-decomposition.
  int dense_threshold = 64;
  std::uint64_t seed = 0x5eed5eedULL;
};

/// Largest eigenvalue modulus, by block power iteration with Rayleigh-Ritz
/// extraction on the iterated subspace.
double spectral_radius(const SparseMatrix& matrix, const SpectralRadiusOptions& options = {});

class Reservoir {
 public:
  Reservoir(ReservoirConfig config, SparseMatrix w_esn, Eigen::MatrixXd w_in,
            Eigen::VectorXd bias);

  /// Draws a reservoir from `config.seed`. If the sparse draw has zero spectral
  /// radius, the next seed stream is used; see seed_retries().
  static Reservoir build(const ReservoirConfig& config);

  /// X <- tanh(W_esn X + G W_in u + b).
  void step(const Eigen::Ref<const Eigen::VectorXd>& u);
  void step(const Vec3& u);

  void reset() { state_.setZero(); }

  std::size_t size() const { return static_cast<std::size_t>(state_.size()); }
  const ReservoirConfig& config() const { return config_; }
  const SparseMatrix& w_esn() const { return w_esn_; }
  const Eigen::MatrixXd& w_in() const { return w_in_; }
  const Eigen::VectorXd& bias() const { return bias_; }
  double gain() const { return config_.gain; }
  const Eigen::VectorXd& state() const { return state_; }
  void set_state(const Eigen::VectorXd& x);

  int seed_retries() const { return seed_retries_; }

 private:
  void update(const Eigen::VectorXd& drive);

  ReservoirConfig config_;
  SparseMatrix w_esn_;
  Eigen::MatrixXd w_in_;
  Eigen::VectorXd bias_;
  Eigen::VectorXd state_;
  Eigen::VectorXd scratch_;
  int seed_retries_ = 0;
};

inline Reservoir build_reservoir(const ReservoirConfig& config) {
  return Reservoir::build(config);
}

/// tanh with |a| > 20 evaluated as +-1 exactly.
inline double saturating_tanh(double a) {
  if (a > 20.0) return 1.0;
  if (a < -20.0) return -1.0;
  return std::tanh(a);
}

class Readout {
 public:
  Readout() = default;
  Readout(Eigen::MatrixXd w_out, double ridge_alpha);

  const Eigen::MatrixXd& w_out() const { return w_out_; }
  double ridge_alpha() const { return ridge_alpha_; }
  std::size_t inputs() const { return static_cast<std::size_t>(w_out_.rows()); }
  std::size_t outputs() const { return static_cast<std::size_t>(w_out_.cols()); }

  /// y = X^T W_out.
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& state) const;

 private:
  Eigen::MatrixXd w_out_;
  double ridge_alpha_ = 0.01;
};

/// Readout of the current reservoir state. Throws on a size mismatch.
Eigen::VectorXd readout(const Reservoir& reservoir, const Readout& ro);

struct Harvest {
  /// One row per retained step: X[n+1] for n >= k_buffer.
  Eigen::MatrixXd states;
  /// Row paired with states.row(i): the next input, series[n+1].
  Eigen::MatrixXd targets;
};

/// Teacher-forces a freshly zeroed reservoir with the series and records the
/// post-buffer states alongside their one-step-ahead targets.
Harvest harvest(Reservoir& reservoir, const SampledSeries& series, std::size_t k_buffer);

/// Accumulates X^T X and X^T Y row by row so the state matrix never has to be
/// stored in full.
class RidgeAccumulator {
 public:
  RidgeAccumulator(std::size_t features, std::size_t outputs, std::size_t block_rows = 256);

  void add(const Eigen::Ref<const Eigen::VectorXd>& state,
           const Eigen::Ref<const Eigen::VectorXd>& target);
  void add_rows(const Eigen::Ref<const Eigen::MatrixXd>& states,
                const Eigen::Ref<const Eigen::MatrixXd>& targets);

  std::size_t rows() const { return rows_; }

  /// Solves (X^T X + alpha I) W = X^T Y. Throws std::runtime_error when the
  /// regularized Gram matrix cannot be factored.
  Readout solve(double alpha);

 private:
  void flush();

  Eigen::MatrixXd gram_;  // lower triangle valid
  Eigen::MatrixXd cross_;
  Eigen::MatrixXd block_states_;
  Eigen::MatrixXd block_targets_;
  std::size_t block_fill_ = 0;
  std::size_t rows_ = 0;
};

/// Ridge regression readout W = (X^T X + alpha I)^{-1} X^T Y via Cholesky.
Readout train(const Eigen::Ref<const Eigen::MatrixXd>& states,
              const Eigen::Ref<const Eigen::MatrixXd>& targets, double alpha);

/// harvest() followed by train(), without materializing the state matrix.
Readout fit_readout(Reservoir& reservoir, const SampledSeries& series, std::size_t k_buffer,
                    double alpha);

struct AutonomousRun {
  SampledSeries output;
  bool diverged = false;
  /// Index of the first output that exceeded the bound (valid if diverged).
  std::size_t divergence_step = 0;
};

/// Warms a zeroed reservoir up on `warmup`, then closes the loop for `steps`
/// outputs. Output 0 is the prediction following the last warmup point; each
/// later output is produced by feeding the previous one back as input. The
/// returned series starts at t0 = 0 and has the warmup's sampling interval.
AutonomousRun run_autonomous(Reservoir& reservoir, const Readout& ro,
                             const SampledSeries& warmup, std::size_t steps,
                             double blowup_bound = kDefaultBlowupBound);

}  // namespace chaosrc
