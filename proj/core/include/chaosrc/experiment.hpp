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

// Sampling-interval sweeps: independent trials per SI, outlier filtering,
// ten-bucket aggregation and persisted results.

#include "chaosrc/dynamics.hpp"
#include "chaosrc/esn.hpp"
#include "chaosrc/metrics.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace chaosrc {

struct SweepConfig {
  OdeSystem system;
  std::vector<double> si_grid;
  std::size_t n_trials = 30;
  ReservoirConfig reservoir;
  /// Training series length K.
  std::size_t series_length = 5000;
  /// Teacher-forced steps before harvesting; also the autonomous warmup length.
  std::size_t buffer = 1000;
  double threshold_h = 0.5;
  double ridge_alpha = 0.01;
  std::size_t grid_resolution = 20;
  double grid_margin = 0.05;
  double epsilon = 1e-8;
  /// Autonomous steps compared against the real continuation.
  std::size_t window = 2000;
  double transient = 50.0;
  double max_internal_step = 1e-3;
  double blowup_bound = kDefaultBlowupBound;
  double outlier_factor = 10.0;
  std::size_t buckets = 10;
  std::uint64_t master_seed = 20230419;
  /// Worker threads; 0 selects the hardware concurrency.
  unsigned threads = 0;
  std::string output_dir = "out";

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;

  /// Smallest SI accepted by default for a system (0.005 Lorenz, 0.01 Rossler).
  static double minimum_si(SystemKind kind);

  /// CI-sized profile: N=500, K=5000, buffer 1000, 30 trials.
  static SweepConfig desk(SystemKind kind);
  /// Full-size profile: N=1500, K=20000, buffer 3000, 1000 trials.
  static SweepConfig full(SystemKind kind);

  friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

/// Counter-based seed split. Keyed on the SI value, not its position in the
/// grid, so extending the grid leaves existing trials untouched.
std::uint64_t derive_seed(std::uint64_t master, double si, std::size_t trial_index);
std::uint64_t derive_stream(std::uint64_t trial_seed, std::uint64_t stream);

struct TrialMetrics {
  SystemKind system = SystemKind::Lorenz;
  double si = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  /// Per-trial horizon from the variance-normalized error of each component.
  std::array<double, 3> mph{};
  std::array<bool, 3> mph_censored{};
  double l1 = 0.0;
  double kld_real_auto = 0.0;
  double kld_auto_real = 0.0;
  double ip = 0.0;
  double ts = 0.0;
  bool diverged = false;
  bool failed = false;
  bool discarded = false;
  std::string error;
};

struct TrialRecord {
  TrialMetrics metrics;
  /// Real continuation and autonomous output over the comparison window.
  SampledSeries real;
  SampledSeries autos;
};

/// Trains one reservoir on a fresh series and scores its autonomous run.
/// Failures are reported through the flags, never thrown.
/// Fills the horizon, density, inner-product and score fields of `m` from a
/// real continuation and the matching autonomous output.
void score_trial(const SweepConfig& cfg, const SampledSeries& real, const SampledSeries& autos,
                 TrialMetrics& m);

TrialRecord run_trial(const SweepConfig& cfg, double si, std::size_t trial_index);

/// Sets `discarded` on every failed or diverged trial and on every trial
/// whose score exceeds outlier_factor times the median score.
void mark_outliers(std::span<TrialRecord> trials, double outlier_factor);

struct IndicatorStats {
  double mean = 0.0;
  double std = 0.0;
  double median = 0.0;
};

struct SweepRow {
  SystemKind system = SystemKind::Lorenz;
  double si = 0.0;
  std::size_t trials = 0;
  std::size_t kept = 0;
  std::size_t discarded = 0;
  std::size_t failed = 0;
  /// Fewer kept trials than buckets: spreads are per-trial instead.
  bool bucket_fallback = false;
  std::array<IndicatorStats, 3> mph{};
  std::array<std::size_t, 3> mph_censored{};
  /// Per-bucket average of the three component horizons.
  IndicatorStats mph_avg;
  IndicatorStats l1;
  IndicatorStats kld_real_auto;
  IndicatorStats kld_auto_real;
  IndicatorStats ip;
  double ts_median = 0.0;
};

/// Contiguous partition sizes: the first (n % buckets) parts get one extra.
std::vector<std::size_t> bucket_sizes(std::size_t n, std::size_t buckets);

/// Mean and population standard deviation.
IndicatorStats mean_std(std::span<const double> values);

/// Aggregates the non-discarded trials of a single SI.
SweepRow aggregate(std::span<const TrialRecord> trials, std::size_t buckets, double threshold_h);

struct SweepResult {
  SweepConfig config;
  std::vector<TrialMetrics> trials;
  std::vector<SweepRow> rows;
};

/// Runs every (si, trial) cell on a bounded worker pool. When `write_outputs`
/// is set, trials.csv, summary.csv and manifest.json go to cfg.output_dir.
SweepResult run_sweep(const SweepConfig& cfg, bool write_outputs = true);

std::string trials_to_csv(std::span<const TrialMetrics> trials);
std::string summary_to_csv(std::span<const SweepRow> rows);
std::vector<TrialMetrics> read_trials_csv(const std::filesystem::path& path);
std::vector<SweepRow> read_summary_csv(const std::filesystem::path& path);

/// Replay record: full config plus every derived trial seed.
std::string manifest_to_json(const SweepConfig& cfg);
SweepConfig read_manifest(const std::filesystem::path& path);

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

}  // namespace chaosrc
