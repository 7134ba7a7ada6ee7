#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace elmg {

/// Paired inputs X (N x d) and targets T (N x M), optionally with the clean
/// targets the noisy ones were derived from.
struct Dataset {
  Matrix inputs;
  Matrix targets;
  std::optional<Matrix> clean_targets;

  [[nodiscard]] Eigen::Index size() const { return inputs.rows(); }

  void validate() const {
    detail::require(inputs.rows() == targets.rows(), "dataset: inputs have " + std::to_string(inputs.rows()) +
                                                         " rows, targets have " + std::to_string(targets.rows()));
    detail::require(inputs.allFinite() && targets.allFinite(), "dataset: non-finite entries");
    if (clean_targets) {
      detail::require(clean_targets->rows() == targets.rows() && clean_targets->cols() == targets.cols(),
                      "dataset: clean targets must match the shape of the targets");
      detail::require(clean_targets->allFinite(), "dataset: non-finite clean targets");
    }
  }

  /// Clean targets when known, else the (possibly noisy) targets.
  [[nodiscard]] const Matrix& truth() const { return clean_targets ? *clean_targets : targets; }
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return res.ec == std::errc() && res.ptr == cell.data() + cell.size() && !cell.empty();
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace detail

/// Shortest decimal text that reads back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Rectangular numeric CSV without header. Blank lines are skipped.
inline Matrix parse_csv_matrix(std::istream& in, const std::string& source = "<stream>") {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_commas(line);
    std::vector<double> row(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!detail::parse_double(cells[c], row[c]))
        throw InputError(source + ": non-numeric cell at row " + std::to_string(lineno) + ", column " +
                         std::to_string(c + 1) + ": '" + std::string(cells[c]) + "'");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InputError(source + ": ragged row " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                       " cells, expected " + std::to_string(rows.front().size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InputError(source + ": no data rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return m;
}

/// Row n = sample n, column m = node m.
inline Matrix load_signal_matrix(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_csv_matrix(in, path.string());
}

inline void write_csv_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << format_double(m(r, c));
    }
    os << '\n';
  }
}

inline void save_signal_matrix(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  write_csv_matrix(out, m);
}

inline Graph load_adjacency(const std::filesystem::path& path) {
  return Graph::from_adjacency(load_signal_matrix(path));
}

inline void save_adjacency(const std::filesystem::path& path, const Graph& g) {
  save_signal_matrix(path, g.adjacency());
}

/// `lat,lon` rows; a leading `lat,lon` header line is accepted.
inline std::vector<GeoPoint> parse_coordinates(std::istream& in, const std::string& source = "<stream>") {
  std::vector<GeoPoint> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = detail::trim(line);
    if (t.empty()) continue;
    const auto cells = detail::split_commas(t);
    if (pts.empty() && cells.size() == 2 && cells[0] == "lat" && cells[1] == "lon") continue;
    if (cells.size() != 2)
      throw InputError(source + ": row " + std::to_string(lineno) + " must have 2 columns (lat,lon)");
    GeoPoint p;
    if (!detail::parse_double(cells[0], p.lat_deg) || !detail::parse_double(cells[1], p.lon_deg))
      throw InputError(source + ": non-numeric coordinate at row " + std::to_string(lineno));
    pts.push_back(p);
  }
  return pts;
}

inline std::vector<GeoPoint> load_coordinates(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  return parse_coordinates(in, path.string());
}

// ---------------------------------------------------------------------------
// Noise, splitting, synthetic data
// ---------------------------------------------------------------------------

enum class NoiseScope {
  DatasetWide,  // one variance from the mean power over all N*M entries
  PerSample,    // variance from each row's own mean power
};

/// Additive white Gaussian noise at `snr_db` relative to the signal power.
inline Matrix add_noise(const Matrix& clean, double snr_db, std::uint64_t seed,
                        NoiseScope scope = NoiseScope::DatasetWide) {
  detail::require(std::isfinite(snr_db), "add_noise: SNR must be finite");
  detail::require(clean.size() > 0 && clean.allFinite(), "add_noise: clean matrix must be non-empty and finite");
  const double power = clean.squaredNorm();
  if (!(power > 0.0)) throw InputError("add_noise: SNR undefined for an all-zero clean matrix");
  const double ratio = std::pow(10.0, -snr_db / 10.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix noisy = clean;
  const double dataset_sd = std::sqrt(power / static_cast<double>(clean.size()) * ratio);
  for (Eigen::Index r = 0; r < clean.rows(); ++r) {
    const double sd = scope == NoiseScope::DatasetWide
                          ? dataset_sd
                          : std::sqrt(clean.row(r).squaredNorm() / static_cast<double>(clean.cols()) * ratio);
    for (Eigen::Index c = 0; c < clean.cols(); ++c) noisy(r, c) += sd * normal(rng);
  }
  return noisy;
}

/// Realized SNR in dB of `noisy` with respect to `clean`.
inline double realized_snr_db(const Matrix& clean, const Matrix& noisy) {
  return 10.0 * std::log10(clean.squaredNorm() / (noisy - clean).squaredNorm());
}

struct SplitIndices {
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> test;
};

/// Uniform random partition of 0..n-1 into n_train and n - n_train indices.
inline SplitIndices random_partition(Eigen::Index n, Eigen::Index n_train, std::uint64_t seed) {
  detail::require(n_train >= 1 && n_train < n, "split: n_train must be in [1, " + std::to_string(n - 1) +
                                                   "], got " + std::to_string(n_train));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  SplitIndices s;
  s.train.assign(idx.begin(), idx.begin() + n_train);
  s.test.assign(idx.begin() + n_train, idx.end());
  return s;
}

inline Dataset subset(const Dataset& ds, const std::vector<Eigen::Index>& rows) {
  Dataset out;
  out.inputs = ds.inputs(rows, Eigen::all);
  out.targets = ds.targets(rows, Eigen::all);
  if (ds.clean_targets) out.clean_targets = Matrix((*ds.clean_targets)(rows, Eigen::all));
  return out;
}

inline std::pair<Dataset, Dataset> split_dataset(const Dataset& ds, Eigen::Index n_train, std::uint64_t seed) {
  ds.validate();
  const SplitIndices s = random_partition(ds.size(), n_train, seed);
  return {subset(ds, s.train), subset(ds, s.test)};
}

inline constexpr double kSynthInputPerturbation = 0.05;

/// Heat-kernel smooth graph signals with a learnable input relation.
///
/// Clean target rows are t_o = V exp(-tau Lambda) V^T g with g white noise;
/// inputs are X = T_o P + 0.05 E with P an M x d N(0, 1/M) projection and E
/// white noise. targets = clean_targets; add noise separately.
inline Dataset synth_smooth_signals(const Graph& g, Eigen::Index num_samples, Eigen::Index input_dim, double tau,
                                    std::uint64_t seed) {
  detail::require(num_samples >= 1, "synth: need at least one sample");
  detail::require(input_dim >= 1, "synth: need input dimension >= 1");
  detail::require(std::isfinite(tau) && tau >= 0.0, "synth: diffusion time must be finite and >= 0");
  const Eigen::Index m = g.num_nodes();
  const LaplacianEigen eig = laplacian_eigendecomposition(laplacian(g));
  const Matrix kernel = eig.eigenvectors * (-tau * eig.eigenvalues.array()).exp().matrix().asDiagonal() *
                        eig.eigenvectors.transpose();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
    Matrix out(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = normal(rng);
    return out;
  };
  const Matrix raw = draw(num_samples, m);
  const Matrix projection = draw(m, input_dim) / std::sqrt(static_cast<double>(m));
  const Matrix perturbation = draw(num_samples, input_dim);

  Dataset ds;
  ds.clean_targets = raw * kernel;  // kernel is symmetric
  ds.targets = *ds.clean_targets;
  ds.inputs = *ds.clean_targets * projection + kSynthInputPerturbation * perturbation;
  return ds;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Dataset plus optional graph loaded from a manifest JSON naming
/// `inputs`, `targets`, optional `clean_targets` and `adjacency`. Relative
/// paths resolve against the manifest's directory.
struct ManifestData {
  Dataset dataset;
  std::optional<Graph> graph;
};

inline ManifestData load_manifest(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const char* key) -> std::optional<std::filesystem::path> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_string()) throw InputError(path.string() + ": '" + key + "' must be a path string");
    std::filesystem::path p = j[key].get<std::string>();
    return p.is_absolute() ? p : base / p;
  };
  const auto inputs = resolve("inputs");
  const auto targets = resolve("targets");
  if (!inputs || !targets) throw InputError(path.string() + ": manifest needs 'inputs' and 'targets'");

  ManifestData out;
  out.dataset.inputs = load_signal_matrix(*inputs);
  out.dataset.targets = load_signal_matrix(*targets);
  if (const auto clean = resolve("clean_targets")) out.dataset.clean_targets = load_signal_matrix(*clean);
  if (const auto adj = resolve("adjacency")) out.graph = load_adjacency(*adj);
  out.dataset.validate();
  if (out.graph && out.graph->num_nodes() != out.dataset.targets.cols())
    throw InputError(path.string() + ": adjacency has " + std::to_string(out.graph->num_nodes()) +
                     " nodes, targets have " + std::to_string(out.dataset.targets.cols()) + " columns");
  return out;
}

}  // namespace elmg
