#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace elmg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Undirected weighted graph over M nodes, stored as a dense adjacency.
///
/// The adjacency is symmetric, nonnegative, finite and has an exactly zero
/// diagonal. Self-loops are dropped on construction; they cancel in D - A.
class Graph {
 public:
  static Graph from_adjacency(Matrix adjacency) {
    detail::require(adjacency.rows() >= 1, "graph: adjacency must have at least one node");
    detail::require(adjacency.rows() == adjacency.cols(),
                    "graph: adjacency must be square, got " + std::to_string(adjacency.rows()) +
                        "x" + std::to_string(adjacency.cols()));
    detail::require(adjacency.allFinite(), "graph: adjacency has non-finite entries");
    detail::require((adjacency.array() >= 0.0).all(), "graph: adjacency has negative weights");
    const double scale = std::max(1.0, adjacency.cwiseAbs().maxCoeff());
    const double asym = (adjacency - adjacency.transpose()).cwiseAbs().maxCoeff();
    detail::require(asym <= 1e-12 * scale, "graph: adjacency is not symmetric");
    Matrix sym = 0.5 * (adjacency + adjacency.transpose());
    sym.diagonal().setZero();
    return Graph(std::move(sym));
  }

  [[nodiscard]] Eigen::Index num_nodes() const { return adjacency_.rows(); }
  [[nodiscard]] const Matrix& adjacency() const { return adjacency_; }

 private:
  explicit Graph(Matrix a) : adjacency_(std::move(a)) {}
  Matrix adjacency_;
};

/// L = D - A together with the degree vector.
struct LaplacianView {
  Matrix matrix;
  Vector degree;

  [[nodiscard]] Eigen::Index size() const { return matrix.rows(); }
};

/// Eigenpairs of a Laplacian, eigenvalues ascending, eigenvectors in columns.
struct LaplacianEigen {
  Matrix eigenvectors;
  Vector eigenvalues;

  [[nodiscard]] Eigen::Index size() const { return eigenvalues.size(); }
};

struct GeoPoint {
  double lat_deg = 0.0;
  double lon_deg = 0.0;
};

inline constexpr double kEarthRadiusKm = 6371.0;

/// Great-circle distance by the haversine formula, in kilometres.
inline double great_circle_km(const GeoPoint& p, const GeoPoint& q) {
  constexpr double deg = std::numbers::pi / 180.0;
  const double phi1 = p.lat_deg * deg;
  const double phi2 = q.lat_deg * deg;
  const double dphi = phi2 - phi1;
  const double dlambda = (q.lon_deg - p.lon_deg) * deg;
  const double s = std::sin(dphi / 2) * std::sin(dphi / 2) +
                   std::cos(phi1) * std::cos(phi2) * std::sin(dlambda / 2) * std::sin(dlambda / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

/// a_ij = exp(-d_ij^2 / sum_{i,j} d_ij^2) over all ordered pairs, a_ii = 0.
inline Graph build_geodesic_graph(std::span<const GeoPoint> coords) {
  const auto m = static_cast<Eigen::Index>(coords.size());
  detail::require(m >= 2, "geodesic graph: need at least 2 nodes, got " + std::to_string(m));
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& c = coords[i];
    detail::require(std::isfinite(c.lat_deg) && std::isfinite(c.lon_deg),
                    "geodesic graph: non-finite coordinate at row " + std::to_string(i));
    detail::require(c.lat_deg >= -90.0 && c.lat_deg <= 90.0,
                    "geodesic graph: latitude out of [-90, 90] at row " + std::to_string(i));
  }

  Matrix d2 = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = great_circle_km(coords[i], coords[j]);
      d2(i, j) = d2(j, i) = d * d;
    }
  }
  const double total = d2.sum();
  if (!(total > 0.0)) throw InputError("geodesic graph: degenerate graph, all points coincide");

  Matrix a = (-d2.array() / total).exp().matrix();
  a.diagonal().setZero();
  return Graph::from_adjacency(std::move(a));
}

/// Random geometric graph on the unit square.
///
/// Nodes are uniform points; i ~ j when their distance is at most `radius`,
/// with weight exp(-d^2 / radius^2). Draws are repeated with successive
/// generator states until the graph is connected.
inline Graph random_geometric_graph(Eigen::Index num_nodes, double radius, std::uint64_t seed) {
  detail::require(num_nodes >= 1, "random geometric graph: need at least one node");
  detail::require(radius > 0.0 && std::isfinite(radius), "random geometric graph: radius must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix pts(num_nodes, 2);
    for (Eigen::Index i = 0; i < num_nodes; ++i) {
      pts(i, 0) = unit(rng);
      pts(i, 1) = unit(rng);
    }
    Matrix a = Matrix::Zero(num_nodes, num_nodes);
    for (Eigen::Index i = 0; i < num_nodes; ++i) {
      for (Eigen::Index j = i + 1; j < num_nodes; ++j) {
        const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
        if (d2 <= radius * radius) a(i, j) = a(j, i) = std::exp(-d2 / (radius * radius));
      }
    }
    // connectivity by breadth-first search
    std::vector<char> seen(static_cast<std::size_t>(num_nodes), 0);
    std::vector<Eigen::Index> frontier{0};
    seen[0] = 1;
    Eigen::Index reached = 1;
    while (!frontier.empty()) {
      const Eigen::Index u = frontier.back();
      frontier.pop_back();
      for (Eigen::Index v = 0; v < num_nodes; ++v) {
        if (a(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          ++reached;
          frontier.push_back(v);
        }
      }
    }
    if (reached == num_nodes) return Graph::from_adjacency(std::move(a));
  }
  throw InputError("random geometric graph: no connected draw found; increase the radius");
}

inline LaplacianView laplacian(const Graph& g) {
  LaplacianView view;
  view.degree = g.adjacency().rowwise().sum();
  view.matrix = -g.adjacency();
  view.matrix.diagonal() += view.degree;
  return view;
}

/// y^T L y.
inline double smoothness(const LaplacianView& l, const Eigen::Ref<const Vector>& y) {
  detail::require(y.size() == l.size(), "smoothness: signal has " + std::to_string(y.size()) +
                                            " entries, graph has " + std::to_string(l.size()) + " nodes");
  return std::max(0.0, y.dot(l.matrix * y));
}

/// Sum of y_n^T L y_n over the rows of Y (one graph signal per row).
inline double total_smoothness(const LaplacianView& l, const Matrix& rows) {
  detail::require(rows.cols() == l.size(), "total_smoothness: column count must equal node count");
  return std::max(0.0, (rows * l.matrix).cwiseProduct(rows).sum());
}

/// Eigenvalues in [-1e-10, 0) are clamped to 0.
inline LaplacianEigen laplacian_eigendecomposition(const LaplacianView& l) {
  const Matrix& m = l.matrix;
  detail::require(m.rows() == m.cols() && m.rows() >= 1, "eigendecomposition: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  detail::require((m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
                  "eigendecomposition: Laplacian is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition: solver did not converge");
  LaplacianEigen out{solver.eigenvectors(), solver.eigenvalues()};
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    double& lam = out.eigenvalues(i);
    if (lam < 0.0 && lam >= -1e-10 * scale) lam = 0.0;
  }
  return out;
}

}  // namespace elmg
