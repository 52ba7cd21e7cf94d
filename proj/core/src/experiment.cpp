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

#include "chaosrc/experiment.hpp"

#include "chaosrc/config.hpp"
#include "chaosrc/csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace chaosrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum Stream : std::uint64_t { kReservoirStream = 0, kTrainStream = 1, kEvalStream = 2 };

}  // namespace

void SweepConfig::validate() const {
  if (n_trials == 0) throw std::invalid_argument("n_trials must be positive");
  for (std::size_t i = 0; i < si_grid.size(); ++i) {
    if (!(si_grid[i] > 0.0) || !std::isfinite(si_grid[i])) {
      throw std::invalid_argument("sampling intervals must be positive");
    }
    if (i > 0 && !(si_grid[i] > si_grid[i - 1])) {
      throw std::invalid_argument("si_grid must be strictly increasing");
    }
  }
  if (buckets == 0) throw std::invalid_argument("buckets must be positive");
  if (window == 0) throw std::invalid_argument("comparison window must be positive");
  if (series_length < buffer + 2) {
    throw std::invalid_argument("series_length must exceed buffer + 1");
  }
  if (!(threshold_h > 0.0)) throw std::invalid_argument("threshold h must be positive");
  if (!(ridge_alpha > 0.0)) throw std::invalid_argument("ridge_alpha must be positive");
  if (grid_resolution == 0) throw std::invalid_argument("grid_resolution must be positive");
  if (!(grid_margin >= 0.0)) throw std::invalid_argument("grid_margin must be >= 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  if (!(transient >= 0.0)) throw std::invalid_argument("transient must be >= 0");
  if (!(max_internal_step > 0.0)) throw std::invalid_argument("max_internal_step must be > 0");
  if (!(blowup_bound > 0.0)) throw std::invalid_argument("blowup_bound must be > 0");
  if (!(outlier_factor > 0.0)) throw std::invalid_argument("outlier_factor must be > 0");
  if (reservoir.input_dim != 3) throw std::invalid_argument("reservoir input_dim must be 3");
  reservoir.validate();
}

double SweepConfig::minimum_si(SystemKind kind) {
  return kind == SystemKind::Lorenz ? 0.005 : 0.01;
}

SweepConfig SweepConfig::desk(SystemKind kind) {
  SweepConfig cfg;
  cfg.system = OdeSystem::defaults(kind);
  cfg.reservoir.nodes = 500;
  cfg.series_length = 5000;
  cfg.buffer = 1000;
  cfg.n_trials = 30;
  if (kind == SystemKind::Lorenz) {
    cfg.si_grid = {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3};
    cfg.threshold_h = 0.5;
    cfg.output_dir = "out/desk_lorenz";
  } else {
    cfg.si_grid = {0.01, 0.05, 0.1, 0.2};
    cfg.threshold_h = 0.1;
    cfg.output_dir = "out/desk_rossler";
  }
  return cfg;
}

SweepConfig SweepConfig::full(SystemKind kind) {
  SweepConfig cfg = desk(kind);
  cfg.reservoir.nodes = 1500;
  cfg.series_length = 20000;
  cfg.buffer = 3000;
  cfg.n_trials = 1000;
  if (kind == SystemKind::Lorenz) {
    cfg.si_grid = {0.005, 0.01, 0.02, 0.03, 0.05, 0.07, 0.1, 0.15, 0.2, 0.25, 0.3};
    cfg.output_dir = "out/full_lorenz";
  } else {
    cfg.si_grid = {0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3};
    cfg.output_dir = "out/full_rossler";
  }
  return cfg;
}

std::uint64_t derive_seed(std::uint64_t master, double si, std::size_t trial_index) {
  const std::uint64_t si_key = mix(std::bit_cast<std::uint64_t>(si));
  return mix(mix(master ^ si_key) + static_cast<std::uint64_t>(trial_index));
}

std::uint64_t derive_stream(std::uint64_t trial_seed, std::uint64_t stream) {
  return mix(trial_seed ^ mix(stream + 0x243f6a8885a308d3ULL));
}

void score_trial(const SweepConfig& cfg, const SampledSeries& real, const SampledSeries& autos,
                 TrialMetrics& m) {
  if (real.size() != autos.size() || real.empty()) {
    throw std::invalid_argument("real and autonomous series must be non-empty and equally long");
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const auto curve = trial_nmse(real, autos, kComponents[c]);
    const MphResult r = mph(curve, cfg.threshold_h, real.si());
    m.mph[c] = r.horizon;
    m.mph_censored[c] = r.censored;
  }
  m.ts = trial_score(real, autos);

  const GridSpec grid = GridSpec::covering(real, cfg.grid_resolution, cfg.grid_margin, cfg.epsilon);
  const DensityGrid rho_real = density(real, grid);
  const DensityGrid rho_auto = density(autos, grid);
  m.l1 = l1_distance(rho_auto, rho_real);
  m.kld_real_auto = kl_divergence(rho_real, rho_auto);
  m.kld_auto_real = kl_divergence(rho_auto, rho_real);
  m.ip = inner_product(autos, cfg.system).value;
}

TrialRecord run_trial(const SweepConfig& cfg, double si, std::size_t trial_index) {
  TrialRecord rec;
  TrialMetrics& m = rec.metrics;
  m.system = cfg.system.kind;
  m.si = si;
  m.trial = trial_index;
  m.seed = derive_seed(cfg.master_seed, si, trial_index);

  const auto fail_metrics = [&m] {
    m.mph = {kNaN, kNaN, kNaN};
    m.l1 = m.kld_real_auto = m.kld_auto_real = m.ip = kNaN;
    m.ts = kInf;
  };

  try {
    const SampleOptions options{cfg.transient, cfg.max_internal_step, cfg.blowup_bound};
    std::mt19937_64 train_rng(derive_stream(m.seed, kTrainStream));
    std::mt19937_64 eval_rng(derive_stream(m.seed, kEvalStream));

    const SampledSeries training = sample(cfg.system, random_initial_state(cfg.system, train_rng),
                                          si, cfg.series_length, options);

    ReservoirConfig res_cfg = cfg.reservoir;
    res_cfg.seed = derive_stream(m.seed, kReservoirStream);
    Reservoir reservoir = Reservoir::build(res_cfg);
    const Readout ro = fit_readout(reservoir, training, cfg.buffer, cfg.ridge_alpha);

    const std::size_t warm = std::max<std::size_t>(cfg.buffer, 1);
    const SampledSeries evaluation = sample(
        cfg.system, random_initial_state(cfg.system, eval_rng), si, warm + cfg.window, options);
    const SampledSeries warmup = evaluation.slice(0, warm);
    rec.real = evaluation.slice(warm, cfg.window);

    AutonomousRun run = run_autonomous(reservoir, ro, warmup, cfg.window, cfg.blowup_bound);
    rec.autos = std::move(run.output);
    if (run.diverged) {
      m.diverged = true;
      fail_metrics();
      return rec;
    }

    score_trial(cfg, rec.real, rec.autos, m);
  } catch (const std::exception& e) {
    m.failed = true;
    m.error = e.what();
    fail_metrics();
  }
  return rec;
}

void mark_outliers(std::span<TrialRecord> trials, double outlier_factor) {
  std::vector<double> scores;
  for (const auto& t : trials) {
    if (!t.metrics.failed && !t.metrics.diverged) scores.push_back(t.metrics.ts);
  }
  const std::vector<bool> flags =
      scores.empty() ? std::vector<bool>{} : filter_outliers(scores, outlier_factor);
  std::size_t k = 0;
  for (auto& t : trials) {
    if (t.metrics.failed || t.metrics.diverged) {
      t.metrics.discarded = true;
    } else {
      t.metrics.discarded = flags[k++];
    }
  }
}

std::vector<std::size_t> bucket_sizes(std::size_t n, std::size_t buckets) {
  if (buckets == 0) throw std::invalid_argument("buckets must be positive");
  const std::size_t used = std::min(n, buckets);
  std::vector<std::size_t> sizes(used, used == 0 ? 0 : n / used);
  for (std::size_t b = 0; b < n % std::max<std::size_t>(used, 1); ++b) ++sizes[b];
  return sizes;
}

IndicatorStats mean_std(std::span<const double> values) {
  IndicatorStats s;
  if (values.empty()) {
    s.mean = s.std = s.median = kNaN;
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(values.size()));
  s.median = median(values);
  return s;
}

namespace {

// Fills mean/std from `spread_values` and the median from `trial_values`.
IndicatorStats indicator(std::span<const double> spread_values,
                         std::span<const double> trial_values) {
  IndicatorStats s = mean_std(spread_values);
  s.median = trial_values.empty() ? kNaN : median(trial_values);
  return s;
}

double average(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return v.empty() ? kNaN : sum / static_cast<double>(v.size());
}

}  // namespace

SweepRow aggregate(std::span<const TrialRecord> trials, std::size_t buckets, double threshold_h) {
  SweepRow row;
  row.trials = trials.size();
  std::vector<const TrialRecord*> kept;
  for (const auto& t : trials) {
    if (t.metrics.failed || t.metrics.diverged) ++row.failed;
    if (t.metrics.discarded) {
      ++row.discarded;
    } else {
      kept.push_back(&t);
    }
  }
  row.kept = kept.size();
  if (!trials.empty()) {
    row.system = trials.front().metrics.system;
    row.si = trials.front().metrics.si;
  }

  std::vector<double> ts, l1, kra, kar, ip;
  std::array<std::vector<double>, 3> trial_mph;
  for (const auto* t : kept) {
    ts.push_back(t->metrics.ts);
    l1.push_back(t->metrics.l1);
    kra.push_back(t->metrics.kld_real_auto);
    kar.push_back(t->metrics.kld_auto_real);
    ip.push_back(t->metrics.ip);
    for (std::size_t c = 0; c < 3; ++c) trial_mph[c].push_back(t->metrics.mph[c]);
  }
  row.ts_median = ts.empty() ? kNaN : median(ts);

  if (kept.empty()) {
    row.bucket_fallback = true;
    const IndicatorStats none{kNaN, kNaN, kNaN};
    row.mph = {none, none, none};
    row.mph_avg = row.l1 = row.kld_real_auto = row.kld_auto_real = row.ip = none;
    return row;
  }

  const auto ensemble_of = [](std::span<const TrialRecord* const> part) {
    EnsemblePair pair;
    for (const auto* t : part) {
      pair.real.push_back(t->real);
      pair.autos.push_back(t->autos);
    }
    return pair;
  };
  const double si = row.si;

  if (kept.size() < buckets) {
    row.bucket_fallback = true;
    const EnsemblePair all = ensemble_of(kept);
    std::vector<double> avg_per_trial(kept.size(), 0.0);
    double ensemble_avg = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const MphResult r = mph(nmse_curve(all, kComponents[c]), threshold_h, si);
      IndicatorStats s = mean_std(trial_mph[c]);
      s.mean = r.horizon;
      row.mph[c] = s;
      row.mph_censored[c] = r.censored ? 1 : 0;
      ensemble_avg += r.horizon / 3.0;
      for (std::size_t i = 0; i < kept.size(); ++i) avg_per_trial[i] += trial_mph[c][i] / 3.0;
    }
    row.mph_avg = mean_std(avg_per_trial);
    row.mph_avg.mean = ensemble_avg;
    row.l1 = mean_std(l1);
    row.kld_real_auto = mean_std(kra);
    row.kld_auto_real = mean_std(kar);
    row.ip = mean_std(ip);
    return row;
  }

  const auto sizes = bucket_sizes(kept.size(), buckets);
  std::array<std::vector<double>, 3> bucket_mph;
  std::vector<double> bucket_avg, bucket_l1, bucket_kra, bucket_kar, bucket_ip;
  std::size_t begin = 0;
  for (const std::size_t size : sizes) {
    const std::span<const TrialRecord* const> part(kept.data() + begin, size);
    const EnsemblePair pair = ensemble_of(part);
    double avg = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      const MphResult r = mph(nmse_curve(pair, kComponents[c]), threshold_h, si);
      bucket_mph[c].push_back(r.horizon);
      if (r.censored) ++row.mph_censored[c];
      avg += r.horizon / 3.0;
    }
    bucket_avg.push_back(avg);
    const auto sub = [&](const std::vector<double>& v) {
      return average(std::span<const double>(v.data() + begin, size));
    };
    bucket_l1.push_back(sub(l1));
    bucket_kra.push_back(sub(kra));
    bucket_kar.push_back(sub(kar));
    bucket_ip.push_back(sub(ip));
    begin += size;
  }
  for (std::size_t c = 0; c < 3; ++c) row.mph[c] = indicator(bucket_mph[c], trial_mph[c]);
  std::vector<double> trial_avg(kept.size(), 0.0);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    trial_avg[i] = (trial_mph[0][i] + trial_mph[1][i] + trial_mph[2][i]) / 3.0;
  }
  row.mph_avg = indicator(bucket_avg, trial_avg);
  row.l1 = indicator(bucket_l1, l1);
  row.kld_real_auto = indicator(bucket_kra, kra);
  row.kld_auto_real = indicator(bucket_kar, kar);
  row.ip = indicator(bucket_ip, ip);
  return row;
}

SweepResult run_sweep(const SweepConfig& cfg, bool write_outputs) {
  cfg.validate();
  SweepResult result;
  result.config = cfg;

  unsigned workers = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1, static_cast<unsigned>(cfg.n_trials));

  for (const double si : cfg.si_grid) {
    std::vector<TrialRecord> records(cfg.n_trials);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
      for (std::size_t i = next++; i < cfg.n_trials; i = next++) {
        records[i] = run_trial(cfg, si, i);
      }
    };
    if (workers == 1) {
      work();
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    mark_outliers(records, cfg.outlier_factor);
    result.rows.push_back(aggregate(records, cfg.buckets, cfg.threshold_h));
    for (auto& r : records) result.trials.push_back(std::move(r.metrics));
  }

  if (write_outputs) write_sweep_outputs(result, cfg.output_dir);
  return result;
}

namespace {

std::string fmt(double v) { return csv::format_double(v); }

std::string sanitize(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n' || c == '\r'; },
                  ';');
  return s;
}

bool parse_flag(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw std::invalid_argument("bad flag '" + s + "'");
}

std::uint64_t parse_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return v;
}

SystemKind parse_kind(const std::string& s) {
  const auto k = parse_system_kind(s);
  if (!k) throw std::invalid_argument("bad system '" + s + "'");
  return *k;
}

const char* const kStatNames[] = {"mean", "std", "median"};

}  // namespace

std::string trials_to_csv(std::span<const TrialMetrics> trials) {
  std::ostringstream os;
  os << "system,si,trial,seed,mph_chi,mph_psi,mph_omega,censored_chi,censored_psi,"
        "censored_omega,l1,kld_real_auto,kld_auto_real,ip,ts,diverged,failed,discarded,error\n";
  for (const auto& t : trials) {
    os << to_string(t.system) << ',' << fmt(t.si) << ',' << t.trial << ',' << t.seed;
    for (double v : t.mph) os << ',' << fmt(v);
    for (bool b : t.mph_censored) os << ',' << (b ? 1 : 0);
    os << ',' << fmt(t.l1) << ',' << fmt(t.kld_real_auto) << ',' << fmt(t.kld_auto_real) << ','
       << fmt(t.ip) << ',' << fmt(t.ts) << ',' << (t.diverged ? 1 : 0) << ','
       << (t.failed ? 1 : 0) << ',' << (t.discarded ? 1 : 0) << ',' << sanitize(t.error) << '\n';
  }
  return os.str();
}

std::string summary_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "system,si,trials,kept,discarded,failed,bucket_fallback";
  const auto stat_header = [&](const std::string& name) {
    for (const char* s : kStatNames) os << ',' << name << '_' << s;
  };
  for (const auto c : kComponents) {
    stat_header("mph_" + std::string(to_string(c)));
    os << ",mph_" << to_string(c) << "_censored";
  }
  stat_header("mph_avg");
  stat_header("l1");
  stat_header("kld_real_auto");
  stat_header("kld_auto_real");
  stat_header("ip");
  os << ",ts_median\n";

  const auto stat = [&](const IndicatorStats& s) {
    os << ',' << fmt(s.mean) << ',' << fmt(s.std) << ',' << fmt(s.median);
  };
  for (const auto& r : rows) {
    os << to_string(r.system) << ',' << fmt(r.si) << ',' << r.trials << ',' << r.kept << ','
       << r.discarded << ',' << r.failed << ',' << (r.bucket_fallback ? 1 : 0);
    for (std::size_t c = 0; c < 3; ++c) {
      stat(r.mph[c]);
      os << ',' << r.mph_censored[c];
    }
    stat(r.mph_avg);
    stat(r.l1);
    stat(r.kld_real_auto);
    stat(r.kld_auto_real);
    stat(r.ip);
    os << ',' << fmt(r.ts_median) << '\n';
  }
  return os.str();
}

std::vector<TrialMetrics> read_trials_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_table(path);
  const auto col = [&](const char* name) { return table.column(name); };
  std::vector<TrialMetrics> out;
  for (const auto& row : table.rows) {
    TrialMetrics t;
    t.system = parse_kind(row[col("system")]);
    t.si = csv::parse_double(row[col("si")]);
    t.trial = static_cast<std::size_t>(parse_u64(row[col("trial")]));
    t.seed = parse_u64(row[col("seed")]);
    for (const auto c : kComponents) {
      const auto idx = static_cast<std::size_t>(c);
      t.mph[idx] = csv::parse_double(row[col(("mph_" + std::string(to_string(c))).c_str())]);
      t.mph_censored[idx] = parse_flag(row[col(("censored_" + std::string(to_string(c))).c_str())]);
    }
    t.l1 = csv::parse_double(row[col("l1")]);
    t.kld_real_auto = csv::parse_double(row[col("kld_real_auto")]);
    t.kld_auto_real = csv::parse_double(row[col("kld_auto_real")]);
    t.ip = csv::parse_double(row[col("ip")]);
    t.ts = csv::parse_double(row[col("ts")]);
    t.diverged = parse_flag(row[col("diverged")]);
    t.failed = parse_flag(row[col("failed")]);
    t.discarded = parse_flag(row[col("discarded")]);
    t.error = row[col("error")];
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<SweepRow> read_summary_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read_table(path);
  std::vector<SweepRow> out;
  for (const auto& row : table.rows) {
    const auto get = [&](const std::string& name) -> const std::string& {
      return row[table.column(name)];
    };
    const auto stat = [&](const std::string& name) {
      return IndicatorStats{csv::parse_double(get(name + "_mean")),
                            csv::parse_double(get(name + "_std")),
                            csv::parse_double(get(name + "_median"))};
    };
    SweepRow r;
    r.system = parse_kind(get("system"));
    r.si = csv::parse_double(get("si"));
    r.trials = static_cast<std::size_t>(parse_u64(get("trials")));
    r.kept = static_cast<std::size_t>(parse_u64(get("kept")));
    r.discarded = static_cast<std::size_t>(parse_u64(get("discarded")));
    r.failed = static_cast<std::size_t>(parse_u64(get("failed")));
    r.bucket_fallback = parse_flag(get("bucket_fallback"));
    for (const auto c : kComponents) {
      const auto idx = static_cast<std::size_t>(c);
      const std::string name = "mph_" + std::string(to_string(c));
      r.mph[idx] = stat(name);
      r.mph_censored[idx] = static_cast<std::size_t>(parse_u64(get(name + "_censored")));
    }
    r.mph_avg = stat("mph_avg");
    r.l1 = stat("l1");
    r.kld_real_auto = stat("kld_real_auto");
    r.kld_auto_real = stat("kld_auto_real");
    r.ip = stat("ip");
    r.ts_median = csv::parse_double(get("ts_median"));
    out.push_back(r);
  }
  return out;
}

std::string manifest_to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j;
  j["format"] = "chaosrc-sweep-manifest";
  j["version"] = 1;
  j["config"] = nlohmann::ordered_json::parse(config_to_json(cfg));
  nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
  for (const double si : cfg.si_grid) {
    nlohmann::ordered_json entry;
    entry["si"] = si;
    std::vector<std::uint64_t> trial_seeds(cfg.n_trials);
    for (std::size_t i = 0; i < cfg.n_trials; ++i) trial_seeds[i] = derive_seed(cfg.master_seed, si, i);
    entry["trial_seeds"] = trial_seeds;
    seeds.push_back(std::move(entry));
  }
  j["seeds"] = std::move(seeds);
  return j.dump(2) + "\n";
}

SweepConfig read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  const auto j = nlohmann::json::parse(in);
  if (j.value("format", "") != "chaosrc-sweep-manifest") {
    throw std::runtime_error("not a sweep manifest: " + path.string());
  }
  SweepConfig cfg = config_from_json(j.at("config").dump());
  // The recorded seeds must agree with the derivation this build uses.
  for (const auto& entry : j.at("seeds")) {
    const double si = entry.at("si").get<double>();
    const auto seeds = entry.at("trial_seeds").get<std::vector<std::uint64_t>>();
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      if (seeds[i] != derive_seed(cfg.master_seed, si, i)) {
        throw std::runtime_error("manifest seeds do not match this build's seed derivation");
      }
    }
  }
  return cfg;
}

void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir) {
  csv::write_file(dir / "trials.csv", trials_to_csv(result.trials));
  csv::write_file(dir / "summary.csv", summary_to_csv(result.rows));
  csv::write_file(dir / "manifest.json", manifest_to_json(result.config));
}

}  // namespace chaosrc
