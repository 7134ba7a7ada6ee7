#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "elmg/elmg.hpp"

namespace elmg::testing {

inline double rel_err(const Matrix& got, const Matrix& want) {
  const double denom = want.norm();
  return denom > 0.0 ? (got - want).norm() / denom : (got - want).norm();
}

inline Matrix random_normal(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}

/// Erdos-Renyi style graph with uniform(0.1, 2) weights on each present edge.
inline Graph random_weighted_graph(Eigen::Index m, std::mt19937_64& rng, double density = 0.6) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix a = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j)
      if (unit(rng) < density) a(i, j) = a(j, i) = 0.1 + 1.9 * unit(rng);
  return Graph::from_adjacency(a);
}

/// Kronecker product, written entrywise.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      for (Eigen::Index p = 0; p < b.rows(); ++p)
        for (Eigen::Index q = 0; q < b.cols(); ++q) out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

struct Instance {
  TrainingMatrices tm;
  Graph graph;
  LaplacianView lap;
  LaplacianEigen eig;
};

/// Random small ELMG problem. With `rank_deficient`, H gets a repeated
/// column (and is therefore rank deficient whenever K >= 2).
inline Instance random_instance(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n, Eigen::Index k,
                                bool rank_deficient = false) {
  Matrix h = random_normal(n, k, rng);
  if (rank_deficient && k >= 2) h.col(k - 1) = h.col(0);
  Matrix t = random_normal(n, m, rng);
  Graph g = random_weighted_graph(m, rng);
  LaplacianView lap = laplacian(g);
  LaplacianEigen eig = laplacian_eigendecomposition(lap);
  return Instance{TrainingMatrices{std::move(h), std::move(t)}, std::move(g), std::move(lap), std::move(eig)};
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const char* base = std::getenv("ELMG_TEST_TMP");
  std::filesystem::path dir = base ? std::filesystem::path(base) : std::filesystem::temp_directory_path() / "elmg_tests";
  dir /= name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace elmg::testing
