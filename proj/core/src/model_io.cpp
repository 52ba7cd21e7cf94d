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

#include "chaosrc/model_io.hpp"

#include "chaosrc/csv.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace chaosrc {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw std::runtime_error("model matrix has wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto row = j[static_cast<std::size_t>(i)].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::runtime_error("model matrix has wrong column count");
    }
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
  }
  return m;
}

}  // namespace

std::string model_to_json(const ModelFile& model) {
  const Reservoir& res = model.reservoir;
  const ReservoirConfig& cfg = res.config();
  nlohmann::ordered_json j;
  j["format"] = "chaosrc-model";
  j["version"] = 1;
  j["system"] = {{"kind", std::string(model.system.name())},
                 {"params", std::vector<double>(model.system.params.begin(),
                                                model.system.params.end())}};
  j["training"] = {{"si", model.si}, {"buffer", model.buffer}};
  j["config"] = {{"nodes", cfg.nodes},
                 {"gain", cfg.gain},
                 {"connectivity", cfg.connectivity},
                 {"spectral_radius", cfg.spectral_radius},
                 {"input_dim", cfg.input_dim},
                 {"input_weight_range", cfg.input_weight_range},
                 {"bias_range", cfg.bias_range},
                 {"seed", cfg.seed}};
  j["seed_retries"] = res.seed_retries();

  json triplets = json::array();
  const SparseMatrix& w = res.w_esn();
  for (Eigen::Index r = 0; r < w.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(w, r); it; ++it) {
      triplets.push_back(json::array({it.row(), it.col(), it.value()}));
    }
  }
  j["w_esn"] = std::move(triplets);
  j["w_in"] = matrix_to_json(res.w_in());
  j["bias"] = std::vector<double>(res.bias().data(), res.bias().data() + res.bias().size());
  if (model.readout) {
    j["readout"] = {{"ridge_alpha", model.readout->ridge_alpha()},
                    {"w_out", matrix_to_json(model.readout->w_out())}};
  }
  return j.dump() + "\n";
}

ModelFile model_from_json(const std::string& text) {
  const json j = json::parse(text);
  if (j.value("format", "") != "chaosrc-model") throw std::runtime_error("not a chaosrc model");

  ReservoirConfig cfg;
  const json& c = j.at("config");
  cfg.nodes = c.at("nodes").get<std::size_t>();
  cfg.gain = c.at("gain").get<double>();
  cfg.connectivity = c.at("connectivity").get<double>();
  cfg.spectral_radius = c.at("spectral_radius").get<double>();
  cfg.input_dim = c.at("input_dim").get<std::size_t>();
  cfg.input_weight_range = c.at("input_weight_range").get<double>();
  cfg.bias_range = c.at("bias_range").get<double>();
  cfg.seed = c.at("seed").get<std::uint64_t>();
  cfg.validate();

  const auto n = static_cast<Eigen::Index>(cfg.nodes);
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& t : j.at("w_esn")) {
    const auto row = t.at(0).get<Eigen::Index>();
    const auto col = t.at(1).get<Eigen::Index>();
    if (row < 0 || row >= n || col < 0 || col >= n) throw std::runtime_error("w_esn index out of range");
    triplets.emplace_back(row, col, t.at(2).get<double>());
  }
  SparseMatrix w_esn(n, n);
  w_esn.setFromTriplets(triplets.begin(), triplets.end());

  Eigen::MatrixXd w_in =
      matrix_from_json(j.at("w_in"), n, static_cast<Eigen::Index>(cfg.input_dim));
  const auto bias_vec = j.at("bias").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(bias_vec.size()) != n) throw std::runtime_error("bias has wrong size");
  Eigen::VectorXd bias = Eigen::Map<const Eigen::VectorXd>(bias_vec.data(), n);

  OdeSystem system;
  if (j.contains("system")) {
    const auto kind = parse_system_kind(j["system"].at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown system in model");
    const auto p = j["system"].at("params").get<std::vector<double>>();
    if (p.size() != 3) throw std::runtime_error("system params must have 3 entries");
    system = {*kind, {p[0], p[1], p[2]}};
  }

  ModelFile model{Reservoir(cfg, std::move(w_esn), std::move(w_in), std::move(bias)),
                  std::nullopt, 0.0, 0, system};
  if (j.contains("training")) {
    model.si = j["training"].value("si", 0.0);
    model.buffer = j["training"].value("buffer", std::size_t{0});
  }
  if (j.contains("readout")) {
    const json& r = j["readout"];
    model.readout = Readout(matrix_from_json(r.at("w_out"), n, 3), r.at("ridge_alpha").get<double>());
  }
  return model;
}

void save_model(const std::filesystem::path& path, const ModelFile& model) {
  csv::write_file(path, model_to_json(model));
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace chaosrc
