#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "errors.hpp"
#include "model.hpp"

namespace elmg {

namespace detail {

inline nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw InputError(std::string("model: '") + name + "' must have " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InputError(std::string("model: row ") + std::to_string(r) + " of '" + name + "' must have " +
                       std::to_string(cols) + " entries");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace detail

inline nlohmann::json model_to_json(const ElmModel& model) {
  nlohmann::json j;
  j["kind"] = std::string(to_string(model.hidden.kind));
  j["K"] = model.hidden.num_neurons();
  j["d"] = model.hidden.input_dim();
  j["M"] = model.num_nodes();
  j["weights"] = detail::matrix_to_json(model.hidden.weights);
  j["offsets"] = std::vector<double>(model.hidden.offsets.begin(), model.hidden.offsets.end());
  j["W"] = detail::matrix_to_json(model.output_weights);
  j["alpha"] = model.hyperparams.alpha;
  j["beta"] = model.hyperparams.beta;
  j["seed"] = model.seed;
  return j;
}

inline ElmModel model_from_json(const nlohmann::json& j) {
  try {
    ElmModel model;
    model.hidden.kind = parse_activation(j.at("kind").get<std::string>());
    const auto k = j.at("K").get<Eigen::Index>();
    const auto d = j.at("d").get<Eigen::Index>();
    const auto m = j.at("M").get<Eigen::Index>();
    detail::require(k >= 1 && d >= 1 && m >= 1, "model: K, d and M must be positive");
    model.hidden.weights = detail::matrix_from_json(j.at("weights"), k, d, "weights");
    const auto offsets = j.at("offsets").get<std::vector<double>>();
    detail::require(static_cast<Eigen::Index>(offsets.size()) == k, "model: 'offsets' must have K entries");
    model.hidden.offsets = Eigen::Map<const Vector>(offsets.data(), k);
    model.output_weights = detail::matrix_from_json(j.at("W"), k, m, "W");
    model.hyperparams = {j.at("alpha").get<double>(), j.at("beta").get<double>()};
    model.seed = j.at("seed").get<std::uint64_t>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("model: malformed document: ") + e.what());
  }
}

inline void save_model(const std::filesystem::path& path, const ElmModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << model_to_json(model).dump(2) << '\n';
}

inline ElmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  return model_from_json(j);
}

}  // namespace elmg
