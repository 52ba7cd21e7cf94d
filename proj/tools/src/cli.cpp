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

#include "chaosrc/tools/cli.hpp"

#include "chaosrc/config.hpp"
#include "chaosrc/csv.hpp"
#include "chaosrc/dynamics.hpp"
#include "chaosrc/esn.hpp"
#include "chaosrc/experiment.hpp"
#include "chaosrc/metrics.hpp"
#include "chaosrc/model_io.hpp"
#include "chaosrc/series_io.hpp"
#include "chaosrc/tools/plot.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

namespace chaosrc::tools {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  // shared
  std::string config;
  std::vector<std::string> sets;
  std::string output;
  std::string system;

  // generate
  double si = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 20230419;
  std::vector<double> params;
  std::vector<double> initial;
  double transient = 50.0;
  double max_step = 1e-3;

  // train
  std::string series;
  std::optional<std::uint64_t> reservoir_seed;

  // autorun
  std::string model;
  std::string warmup;
  std::size_t steps = 0;
  double blowup = kDefaultBlowupBound;

  // metrics
  std::string real;
  std::string autos;

  // sweep
  std::string replay;
  std::string output_dir;
  unsigned threads = 0;
  bool threads_set = false;
  bool plots = false;
  bool no_svg = false;
  bool dump_config = false;

  // spectrum
  std::vector<std::string> inputs;
  std::vector<std::string> references;
  std::string component = "chi";
  std::string svg;

  // plot
  std::string summary;
  std::string kind = "all";
};

SystemKind system_or_throw(const std::string& name) {
  const auto k = parse_system_kind(name);
  if (!k) throw UsageError("unknown system '" + name + "'");
  return *k;
}

SweepConfig load_sweep_config(const Options& o) {
  SweepConfig cfg = resolve_config(o.config.empty() ? "desk_lorenz" : o.config);
  for (const auto& s : o.sets) {
    try {
      apply_override(cfg, s);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  return cfg;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    csv::write_file(path, text);
  }
}

SampledSeries read_series(const std::string& path) {
  return read_series_csv(std::filesystem::path(path));
}

void check_same_si(double a, double b, const char* what) {
  if (std::abs(a - b) > 1e-9 * std::max(std::abs(a), std::abs(b))) {
    throw std::runtime_error(std::string(what) + ": sampling intervals differ (" +
                             csv::format_double(a) + " vs " + csv::format_double(b) + ")");
  }
}

int cmd_generate(const Options& o, std::ostream& out, std::ostream& err) {
  OdeSystem system = OdeSystem::defaults(system_or_throw(o.system));
  if (!o.params.empty()) std::copy(o.params.begin(), o.params.end(), system.params.begin());
  StatePoint start;
  if (!o.initial.empty()) {
    start = StatePoint{0.0, o.initial[0], o.initial[1], o.initial[2]};
  } else {
    std::mt19937_64 rng(o.seed);
    start = random_initial_state(system, rng);
  }
  const SampledSeries s =
      sample(system, start, o.si, o.count, SampleOptions{o.transient, o.max_step, o.blowup});
  emit(o.output, series_to_csv(s), out);
  if (o.output != "-") {
    err << "wrote " << s.size() << " samples of " << system.name() << " at si=" << o.si << " to "
        << o.output << '\n';
  }
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  SweepConfig cfg = load_sweep_config(o);
  if (!o.system.empty()) cfg.system = OdeSystem::defaults(system_or_throw(o.system));
  const SampledSeries series = read_series(o.series);
  if (series.size() <= cfg.buffer + 1) {
    throw std::runtime_error("training series has " + std::to_string(series.size()) +
                             " samples; needs more than buffer+1 = " +
                             std::to_string(cfg.buffer + 1));
  }
  ReservoirConfig rc = cfg.reservoir;
  rc.seed = o.reservoir_seed.value_or(cfg.master_seed);
  Reservoir reservoir = Reservoir::build(rc);
  const Readout ro = fit_readout(reservoir, series, cfg.buffer, cfg.ridge_alpha);
  reservoir.reset();
  save_model(o.output, ModelFile{reservoir, ro, series.si(), cfg.buffer, cfg.system});
  out << "trained N=" << reservoir.size() << " on " << series.size() - 1 - cfg.buffer
      << " rows (alpha=" << cfg.ridge_alpha << ") -> " << o.output << '\n';
  return kExitOk;
}

int cmd_autorun(const Options& o, std::ostream& out, std::ostream& err) {
  ModelFile model = load_model(o.model);
  if (!model.readout) throw std::runtime_error(o.model + " has no trained readout");
  const SampledSeries warm = read_series(o.warmup);
  check_same_si(model.si, warm.si(), "warmup");
  model.reservoir.reset();
  const AutonomousRun run = run_autonomous(model.reservoir, *model.readout, warm, o.steps, o.blowup);
  emit(o.output, series_to_csv(run.output), out);
  if (run.diverged) {
    err << "warning: autonomous run diverged at step " << run.divergence_step << "; wrote "
        << run.output.size() << " samples\n";
  }
  return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out) {
  SweepConfig cfg = load_sweep_config(o);
  if (!o.system.empty()) cfg.system = OdeSystem::defaults(system_or_throw(o.system));
  const SampledSeries real = read_series(o.real);
  const SampledSeries autos = read_series(o.autos);
  check_same_si(real.si(), autos.si(), "metrics");
  TrialMetrics m;
  m.system = cfg.system.kind;
  m.si = real.si();
  score_trial(cfg, real, autos, m);
  const std::vector<TrialMetrics> rows{m};
  emit(o.output, trials_to_csv(rows), out);
  return kExitOk;
}

void print_summary(const SweepResult& r, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %7s %16s %9s %9s %9s\n", "si", "kept", "mph_avg",
                "l1_med", "kld_med", "ip_mean");
  out << line;
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%-8g %3zu/%-3zu %8.3f+-%-6.3f %9.3f %9.3f %9.3f\n", row.si,
                  row.kept, row.trials, row.mph_avg.mean, row.mph_avg.std, row.l1.median,
                  row.kld_auto_real.median, row.ip.mean);
    out << line;
  }
}

int cmd_sweep(const Options& o, std::ostream& out) {
  SweepConfig cfg;
  if (!o.replay.empty()) {
    cfg = read_manifest(o.replay);
  } else {
    cfg = load_sweep_config(o);
  }
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (o.threads_set) cfg.threads = o.threads;
  if (o.dump_config) {
    out << config_to_ini(cfg);
    return kExitOk;
  }
  cfg.validate();
  const SweepResult result = run_sweep(cfg, true);
  if (o.plots && !result.rows.empty()) {
    const auto dir = std::filesystem::path(cfg.output_dir) / "plots";
    for (PlotKind k : {PlotKind::Mph, PlotKind::L1, PlotKind::Kld, PlotKind::Ip}) {
      emit_plot_data(result.rows, k, dir, !o.no_svg);
    }
  }
  print_summary(result, out);
  out << "outputs in " << cfg.output_dir << '\n';
  return kExitOk;
}

struct MeanSpectrum {
  Spectrum mean;
  std::vector<double> std;
};

MeanSpectrum mean_spectrum(const std::vector<std::string>& paths, Component c) {
  MeanSpectrum r;
  std::vector<std::vector<double>> amps;
  double si = 0.0;
  for (const auto& p : paths) {
    const SampledSeries s = read_series(p);
    if (amps.empty()) {
      si = s.si();
    } else {
      check_same_si(si, s.si(), p.c_str());
    }
    Spectrum sp = amplitude_spectrum(s, c);
    if (amps.empty()) {
      r.mean.frequency = sp.frequency;
    } else if (sp.amplitude.size() != amps.front().size()) {
      throw std::runtime_error(p + ": spectrum length differs from " + paths.front());
    }
    amps.push_back(std::move(sp.amplitude));
  }
  const std::size_t bins = amps.front().size();
  r.mean.amplitude.assign(bins, 0.0);
  r.std.assign(bins, 0.0);
  std::vector<double> column(amps.size());
  for (std::size_t k = 0; k < bins; ++k) {
    for (std::size_t i = 0; i < amps.size(); ++i) column[i] = amps[i][k];
    const IndicatorStats st = mean_std(column);
    r.mean.amplitude[k] = st.mean;
    r.std[k] = st.std;
  }
  return r;
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const auto comp = parse_component(o.component);
  if (!comp) throw UsageError("unknown component '" + o.component + "'");
  const MeanSpectrum autos = mean_spectrum(o.inputs, *comp);
  PlotData plot;
  if (o.references.empty()) {
    plot.title = "amplitude spectrum";
    plot.x_label = "frequency";
    plot.y_label = "amplitude";
    plot.series.push_back({"series", autos.mean.frequency, autos.mean.amplitude, autos.std});
  } else {
    const MeanSpectrum real = mean_spectrum(o.references, *comp);
    plot = spectrum_plot(autos.mean, real.mean, autos.std, real.std);
  }
  plot.title += " (" + o.component + ")";
  emit(o.output, plot_to_csv(plot), out);
  if (!o.svg.empty()) csv::write_file(o.svg, plot_to_svg(plot));
  return kExitOk;
}

int cmd_plot(const Options& o, std::ostream& out) {
  std::vector<PlotKind> kinds;
  if (o.kind == "all") {
    kinds = {PlotKind::Mph, PlotKind::L1, PlotKind::Kld, PlotKind::Ip};
  } else {
    const auto k = parse_plot_kind(o.kind);
    if (!k || *k == PlotKind::Spectrum) throw UsageError("unknown plot kind '" + o.kind + "'");
    kinds = {*k};
  }
  const auto rows = read_summary_csv(o.summary);
  if (rows.empty()) throw std::runtime_error(o.summary + " has no rows");
  for (PlotKind k : kinds) {
    for (const auto& p : emit_plot_data(rows, k, o.output_dir, !o.no_svg)) {
      out << p.string() << '\n';
    }
  }
  return kExitOk;
}

void add_config_options(CLI::App* sub, Options& o) {
  sub->add_option("-c,--config", o.config,
                  "Profile name (" + [] {
                    std::string s;
                    for (const auto& n : profile_names()) s += (s.empty() ? "" : ", ") + n;
                    return s;
                  }() + ") or INI file")
      ->envname(kConfigEnv);
  sub->add_option("--set", o.sets, "Override a config key, e.g. --set reservoir.nodes=300")
      ->allow_extra_args(false);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Echo-state-network reservoir experiments on chaotic flows", "chaosrc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "chaosrc 0.1.0");

  auto* gen = app.add_subcommand("generate", "Sample a Lorenz or Rossler trajectory to CSV");
  gen->add_option("--system", o.system, "lorenz or rossler")->default_val("lorenz");
  gen->add_option("--si", o.si, "Sampling interval")->required()->check(CLI::PositiveNumber);
  gen->add_option("--count", o.count, "Number of samples")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Seed for the random initial condition")->capture_default_str();
  gen->add_option("--params", o.params, "Three system parameters")->expected(3)->delimiter(',');
  gen->add_option("--initial", o.initial, "Initial state x,y,z")->expected(3)->delimiter(',');
  gen->add_option("--transient", o.transient, "Discarded time before the first sample")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--max-step", o.max_step, "Largest internal RK4 step")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", o.output, "Output CSV path, or - for stdout")->required();

  auto* train = app.add_subcommand("train", "Fit a readout on a series and save the model");
  add_config_options(train, o);
  train->add_option("--series", o.series, "Training series CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--system", o.system, "System the series was sampled from");
  train->add_option("--seed", o.reservoir_seed, "Reservoir seed (defaults to run.seed)");
  train->add_option("-o,--output", o.output, "Model JSON path")->required();

  auto* autorun = app.add_subcommand("autorun", "Warm a model up and run it in closed loop");
  autorun->add_option("--model", o.model, "Model JSON")->required()->check(CLI::ExistingFile);
  autorun->add_option("--warmup", o.warmup, "Teacher-forcing series CSV")
      ->required()
      ->check(CLI::ExistingFile);
  autorun->add_option("--steps", o.steps, "Autonomous steps")->required()->check(CLI::PositiveNumber);
  autorun->add_option("--blowup", o.blowup, "Divergence bound")->capture_default_str();
  autorun->add_option("-o,--output", o.output, "Output CSV path, or - for stdout")->required();

  auto* metrics = app.add_subcommand("metrics", "Compare an autonomous series with the real one");
  add_config_options(metrics, o);
  metrics->add_option("--real", o.real, "Real series CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--auto", o.autos, "Autonomous series CSV")
      ->required()
      ->check(CLI::ExistingFile);
  metrics->add_option("--system", o.system, "Vector field used for the inner product");
  metrics->add_option("-o,--output", o.output, "Output CSV path, or - for stdout")->default_val("-");

  auto* sweep = app.add_subcommand("sweep", "Run trials over the SI grid and aggregate");
  add_config_options(sweep, o);
  auto* replay = sweep->add_option("--replay", o.replay, "Re-run the sweep recorded in a manifest")
                     ->check(CLI::ExistingFile);
  replay->excludes("--config")->excludes("--set");
  sweep->add_option("--output-dir", o.output_dir, "Overrides run.output_dir");
  sweep->add_option("--threads", o.threads, "Overrides run.threads")
      ->each([&o](const std::string&) { o.threads_set = true; });
  sweep->add_flag("--plots", o.plots, "Also write plot data under <output_dir>/plots");
  sweep->add_flag("--no-svg", o.no_svg, "Skip SVG rendering of plot data");
  sweep->add_flag("--dump-config", o.dump_config, "Print the resolved config as INI and exit");

  auto* spectrum = app.add_subcommand("spectrum", "Mean amplitude spectrum of one or more series");
  spectrum->add_option("-i,--input", o.inputs, "Series CSV (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  spectrum->add_option("-r,--reference", o.references, "Reference series CSV to overlay")
      ->check(CLI::ExistingFile);
  spectrum->add_option("--component", o.component, "chi, psi or omega")->capture_default_str();
  spectrum->add_option("-o,--output", o.output, "Output CSV path, or - for stdout")->default_val("-");
  spectrum->add_option("--svg", o.svg, "Also render an SVG");

  auto* plot = app.add_subcommand("plot", "Emit plot data from a summary.csv");
  plot->add_option("--summary", o.summary, "summary.csv from a sweep")
      ->required()
      ->check(CLI::ExistingFile);
  plot->add_option("--kind", o.kind, "mph, l1, kld, ip or all")->capture_default_str();
  plot->add_option("--output-dir", o.output_dir, "Directory for CSV and SVG files")->required();
  plot->add_flag("--no-svg", o.no_svg, "Skip SVG rendering");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const CLI::App* target = &app;
    for (const auto* sub : app.get_subcommands()) target = sub;
    err << "chaosrc: " << e.what() << "\n\n" << target->help();
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(o, out, err);
    if (*train) return cmd_train(o, out);
    if (*autorun) return cmd_autorun(o, out, err);
    if (*metrics) return cmd_metrics(o, out);
    if (*sweep) return cmd_sweep(o, out);
    if (*spectrum) return cmd_spectrum(o, out);
    if (*plot) return cmd_plot(o, out);
  } catch (const UsageError& e) {
    err << "chaosrc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "chaosrc: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace chaosrc::tools
