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

#include "chaosrc/config.hpp"

#include "chaosrc/csv.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace chaosrc {

namespace {

enum class ValueKind { Text, Real, Count, RealList };

struct KeyDef {
  ConfigKey key;
  ValueKind kind;
  std::function<void(SweepConfig&, std::string_view)> set;
  std::function<std::string(const SweepConfig&)> get;
};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::uint64_t parse_count(std::string_view text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw std::invalid_argument("not a non-negative integer: '" + t + "'");
  }
  return v;
}

// Shortest text that parses back to the same double.
std::string format_real(double v) {
  if (!std::isfinite(v)) return csv::format_double(v);
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text) { return csv::parse_double(trim(text)); }

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  for (const auto& field : csv::split_line(t)) out.push_back(parse_real(field));
  return out;
}

std::string format_list(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_real(values[i]);
  }
  return out;
}

template <class T>
KeyDef real_key(std::string name, std::string doc, T SweepConfig::*field) {
  return {{std::move(name), std::move(doc)}, ValueKind::Real,
          [field](SweepConfig& c, std::string_view v) { c.*field = parse_real(v); },
          [field](const SweepConfig& c) { return format_real(c.*field); }};
}

template <class T>
KeyDef count_key(std::string name, std::string doc, T SweepConfig::*field) {
  return {{std::move(name), std::move(doc)}, ValueKind::Count,
          [field](SweepConfig& c, std::string_view v) { c.*field = static_cast<T>(parse_count(v)); },
          [field](const SweepConfig& c) { return std::to_string(c.*field); }};
}

template <class T>
KeyDef reservoir_real(std::string name, std::string doc, T ReservoirConfig::*field) {
  return {{std::move(name), std::move(doc)}, ValueKind::Real,
          [field](SweepConfig& c, std::string_view v) { c.reservoir.*field = parse_real(v); },
          [field](const SweepConfig& c) { return format_real(c.reservoir.*field); }};
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    t.push_back({{"system.kind", "chaotic system: lorenz or rossler"}, ValueKind::Text,
                 [](SweepConfig& c, std::string_view v) {
                   const auto kind = parse_system_kind(trim(v));
                   if (!kind) throw std::invalid_argument("unknown system '" + trim(v) + "'");
                   c.system = OdeSystem::defaults(*kind);
                 },
                 [](const SweepConfig& c) { return std::string(c.system.name()); }});
    t.push_back({{"system.params",
                  "three parameters: p,r,b for Lorenz or a,b,c for Rossler"},
                 ValueKind::RealList,
                 [](SweepConfig& c, std::string_view v) {
                   const auto p = parse_list(v);
                   if (p.size() != 3) throw std::invalid_argument("system.params needs 3 values");
                   c.system.params = {p[0], p[1], p[2]};
                 },
                 [](const SweepConfig& c) { return format_list(c.system.params); }});
    t.push_back({{"sampling.si_grid", "comma-separated sampling intervals, increasing"},
                 ValueKind::RealList,
                 [](SweepConfig& c, std::string_view v) { c.si_grid = parse_list(v); },
                 [](const SweepConfig& c) { return format_list(c.si_grid); }});
    t.push_back(count_key("sampling.series_length", "training series length K",
                          &SweepConfig::series_length));
    t.push_back(real_key("sampling.transient", "discarded integration time before sampling",
                         &SweepConfig::transient));
    t.push_back(real_key("sampling.max_internal_step", "upper bound on the RK4 step",
                         &SweepConfig::max_internal_step));
    t.push_back({{"reservoir.nodes", "number of reservoir nodes N"}, ValueKind::Count,
                 [](SweepConfig& c, std::string_view v) {
                   c.reservoir.nodes = static_cast<std::size_t>(parse_count(v));
                 },
                 [](const SweepConfig& c) { return std::to_string(c.reservoir.nodes); }});
    t.push_back(reservoir_real("reservoir.gain", "input gain G", &ReservoirConfig::gain));
    t.push_back(reservoir_real("reservoir.connectivity", "fraction of nonzero recurrent weights",
                               &ReservoirConfig::connectivity));
    t.push_back(reservoir_real("reservoir.spectral_radius",
                               "largest |eigenvalue| of the recurrent matrix",
                               &ReservoirConfig::spectral_radius));
    t.push_back(reservoir_real("reservoir.input_weight_range", "W_in ~ U[-range, range]",
                               &ReservoirConfig::input_weight_range));
    t.push_back(reservoir_real("reservoir.bias_range", "b ~ U[-range, range]",
                               &ReservoirConfig::bias_range));
    t.push_back(count_key("training.buffer", "buffering steps K_buffer (also warmup length)",
                          &SweepConfig::buffer));
    t.push_back(real_key("training.ridge_alpha", "ridge regularization factor",
                         &SweepConfig::ridge_alpha));
    t.push_back(real_key("evaluation.threshold", "MPH threshold h", &SweepConfig::threshold_h));
    t.push_back(count_key("evaluation.window", "autonomous comparison steps",
                          &SweepConfig::window));
    t.push_back(count_key("evaluation.grid_resolution", "density cells per axis",
                          &SweepConfig::grid_resolution));
    t.push_back(real_key("evaluation.grid_margin", "relative margin around the real bounding box",
                         &SweepConfig::grid_margin));
    t.push_back(real_key("evaluation.epsilon", "density smoothing constant",
                         &SweepConfig::epsilon));
    t.push_back(real_key("evaluation.outlier_factor", "discard TS above factor * median",
                         &SweepConfig::outlier_factor));
    t.push_back(count_key("evaluation.buckets", "error-bar buckets", &SweepConfig::buckets));
    t.push_back(real_key("evaluation.blowup_bound", "divergence bound on |component|",
                         &SweepConfig::blowup_bound));
    t.push_back(count_key("run.trials", "trials per sampling interval", &SweepConfig::n_trials));
    t.push_back(count_key("run.seed", "master seed", &SweepConfig::master_seed));
    t.push_back(count_key("run.threads", "worker threads, 0 = hardware concurrency",
                          &SweepConfig::threads));
    t.push_back({{"run.output_dir", "directory for trials.csv, summary.csv, manifest.json"},
                 ValueKind::Text,
                 [](SweepConfig& c, std::string_view v) { c.output_dir = trim(v); },
                 [](const SweepConfig& c) { return c.output_dir; }});
    return t;
  }();
  return table;
}

const KeyDef& find_key(std::string_view name) {
  for (const auto& def : key_table()) {
    if (def.key.name == name) return def;
  }
  throw std::invalid_argument("unknown config key '" + std::string(name) + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& def : key_table()) out.push_back(def.key);
    return out;
  }();
  return keys;
}

void apply_override(SweepConfig& cfg, std::string_view key, std::string_view value) {
  const KeyDef& def = find_key(trim(key));
  try {
    def.set(cfg, value);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(def.key.name + ": " + e.what());
  }
}

void apply_override(SweepConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("override must look like section.key=value: '" +
                                std::string(assignment) + "'");
  }
  apply_override(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

SweepConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }

  SystemKind kind = SystemKind::Lorenz;
  if (const auto k = tree.get_optional<std::string>("system.kind")) {
    const auto parsed = parse_system_kind(trim(*k));
    if (!parsed) throw std::invalid_argument("unknown system '" + *k + "'");
    kind = *parsed;
  }
  SweepConfig cfg = SweepConfig::desk(kind);
  for (const auto& [section, entries] : tree) {
    if (entries.empty()) {
      throw std::invalid_argument("config key '" + section + "' must be inside a section");
    }
    for (const auto& [key, value] : entries) {
      if (section + "." + key == "system.kind") continue;
      apply_override(cfg, section + "." + key, value.data());
    }
  }
  cfg.validate();
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  return parse_config(in);
}

std::string config_to_ini(const SweepConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& def : key_table()) {
    const auto dot = def.key.name.find('.');
    const std::string sec = def.key.name.substr(0, dot);
    if (sec != section) {
      if (!section.empty()) os << '\n';
      os << '[' << sec << "]\n";
      section = sec;
    }
    os << "; " << def.key.description << '\n';
    os << def.key.name.substr(dot + 1) << " = " << def.get(cfg) << '\n';
  }
  return os.str();
}

std::vector<std::string> profile_names() {
  return {"desk_lorenz", "desk_rossler", "full_lorenz", "full_rossler"};
}

std::optional<SweepConfig> builtin_profile(std::string_view name) {
  if (name == "desk_lorenz") return SweepConfig::desk(SystemKind::Lorenz);
  if (name == "desk_rossler") return SweepConfig::desk(SystemKind::Rossler);
  if (name == "full_lorenz") return SweepConfig::full(SystemKind::Lorenz);
  if (name == "full_rossler") return SweepConfig::full(SystemKind::Rossler);
  return std::nullopt;
}

SweepConfig resolve_config(std::string_view name_or_path) {
  if (auto profile = builtin_profile(name_or_path)) return *profile;
  return load_config(std::filesystem::path(name_or_path));
}

std::string config_to_json(const SweepConfig& cfg) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& def : key_table()) {
    const auto dot = def.key.name.find('.');
    const std::string sec = def.key.name.substr(0, dot);
    const std::string key = def.key.name.substr(dot + 1);
    const std::string text = def.get(cfg);
    switch (def.kind) {
      case ValueKind::Text: j[sec][key] = text; break;
      case ValueKind::Real: j[sec][key] = parse_real(text); break;
      case ValueKind::Count: j[sec][key] = parse_count(text); break;
      case ValueKind::RealList: j[sec][key] = parse_list(text); break;
    }
  }
  return j.dump(2);
}

SweepConfig config_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  SystemKind kind = SystemKind::Lorenz;
  if (j.contains("system") && j["system"].contains("kind")) {
    const auto parsed = parse_system_kind(j["system"]["kind"].get<std::string>());
    if (!parsed) throw std::invalid_argument("unknown system in JSON config");
    kind = *parsed;
  }
  SweepConfig cfg = SweepConfig::desk(kind);
  for (const auto& [sec, entries] : j.items()) {
    for (const auto& [key, value] : entries.items()) {
      const std::string name = sec + "." + key;
      if (name == "system.kind") continue;
      const KeyDef& def = find_key(name);
      switch (def.kind) {
        case ValueKind::Text: def.set(cfg, value.get<std::string>()); break;
        case ValueKind::Real: def.set(cfg, csv::format_double(value.get<double>())); break;
        case ValueKind::Count: def.set(cfg, std::to_string(value.get<std::uint64_t>())); break;
        case ValueKind::RealList: def.set(cfg, format_list(value.get<std::vector<double>>())); break;
      }
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace chaosrc
