#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "model.hpp"

namespace elmg {

/// Reduced SVD H = U_H diag(sigma) V_H^T keeping only the numerical rank.
struct HiddenSvd {
  Matrix left_vectors;   // N x r
  Vector singular_values;  // r, descending, > 0
  Matrix right_vectors;  // K x r

  [[nodiscard]] Eigen::Index rank() const { return singular_values.size(); }
};

inline constexpr double kRankTolerance = 1e-10;

inline HiddenSvd hidden_svd(const Matrix& h) {
  detail::require(h.allFinite(), "hidden_svd: matrix has non-finite entries");
  Eigen::BDCSVD<Matrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() > 0 && s(0) > 0.0) {
    const double cutoff = kRankTolerance * s(0);
    while (r < s.size() && s(r) > cutoff) ++r;
  }
  return HiddenSvd{svd.matrixU().leftCols(r), s.head(r), svd.matrixV().leftCols(r)};
}

/// zeta(i2, i1) = 1 / ((1 + beta lambda_i1) + alpha / sigma_i2^2), r x M.
struct ShrinkageSpectrum {
  Matrix coefficients;
};

inline ShrinkageSpectrum shrinkage_coefficients(const HiddenSvd& svd, const LaplacianEigen& eig,
                                                const Hyperparams& hp) {
  hp.validate();
  const Eigen::Index r = svd.rank();
  const Eigen::Index m = eig.size();
  Matrix zeta(r, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < r; ++i) {
      const double s2 = svd.singular_values(i) * svd.singular_values(i);
      zeta(i, j) = 1.0 / ((1.0 + hp.beta * eig.eigenvalues(j)) + hp.alpha / s2);
    }
  }
  return ShrinkageSpectrum{std::move(zeta)};
}

/// Solver that factors H once and then produces weights or fitted outputs
/// for any (alpha, beta) in O(r M (K + N)).
///
/// All work happens in the product basis z = v_{i1} (x) u_{H,i2}: the targets
/// are projected once, Y~ = U_H^T T V, and each hyperparameter pair only
/// rescales Y~ entrywise.
class SpectralSolver {
 public:
  SpectralSolver(const TrainingMatrices& tm, LaplacianEigen eig) : eig_(std::move(eig)) {
    tm.validate();
    detail::require(eig_.size() == tm.num_nodes(), "spectral solver: eigendecomposition has " +
                                                       std::to_string(eig_.size()) + " nodes, targets have " +
                                                       std::to_string(tm.num_nodes()));
    svd_ = hidden_svd(tm.hidden);
    num_neurons_ = tm.num_neurons();
    projected_ = svd_.left_vectors.transpose() * tm.targets * eig_.eigenvectors;
  }

  [[nodiscard]] const HiddenSvd& svd() const { return svd_; }
  [[nodiscard]] const LaplacianEigen& eigen() const { return eig_; }
  /// U_H^T T V, r x M.
  [[nodiscard]] const Matrix& projected_targets() const { return projected_; }

  /// Output weights W (K x M). Throws SingularityError at alpha = 0 when H
  /// is rank deficient.
  [[nodiscard]] Matrix weights(const Hyperparams& hp) const {
    hp.validate();
    if (hp.alpha == 0.0 && svd_.rank() < num_neurons_)
      throw SingularityError("spectral solver: alpha = 0 with rank(H) = " + std::to_string(svd_.rank()) +
                             " < K = " + std::to_string(num_neurons_) + " (condition estimate inf)");
    const Eigen::Index r = svd_.rank();
    const Eigen::Index m = eig_.size();
    Matrix scaled(r, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double graph_factor = 1.0 + hp.beta * eig_.eigenvalues(j);
      for (Eigen::Index i = 0; i < r; ++i) {
        const double s = svd_.singular_values(i);
        scaled(i, j) = s * projected_(i, j) / (graph_factor * s * s + hp.alpha);
      }
    }
    return svd_.right_vectors * scaled * eig_.eigenvectors.transpose();
  }

  /// Fitted training output Y = U_H (zeta o Y~) V^T.
  [[nodiscard]] Matrix fitted(const Hyperparams& hp) const {
    const ShrinkageSpectrum zeta = shrinkage_coefficients(svd_, eig_, hp);
    return svd_.left_vectors * zeta.coefficients.cwiseProduct(projected_) * eig_.eigenvectors.transpose();
  }

 private:
  LaplacianEigen eig_;
  HiddenSvd svd_;
  Eigen::Index num_neurons_ = 0;
  Matrix projected_;
};

/// vec(Y) = sum_i zeta_i z_i z_i^T vec(T), computed without forming Z.
inline Matrix training_fit_spectral(const TrainingMatrices& tm, const LaplacianEigen& eig, const Hyperparams& hp) {
  return SpectralSolver(tm, eig).fitted(hp);
}

struct SpectralComponent {
  Eigen::Index lambda_index = 0;
  Eigen::Index sigma_index = 0;
  double lambda = 0.0;
  double sigma2 = 0.0;
  double zeta = 0.0;
  double input_energy = 0.0;
  double retained_energy = 0.0;
};

struct SmoothingReport {
  std::vector<SpectralComponent> components;  // by retained energy, descending

  [[nodiscard]] double total_input_energy() const {
    return std::accumulate(components.begin(), components.end(), 0.0,
                           [](double acc, const SpectralComponent& c) { return acc + c.input_energy; });
  }
  [[nodiscard]] double total_retained_energy() const {
    return std::accumulate(components.begin(), components.end(), 0.0,
                           [](double acc, const SpectralComponent& c) { return acc + c.retained_energy; });
  }
};

inline SmoothingReport smoothing_report(const TrainingMatrices& tm, const LaplacianEigen& eig, const Hyperparams& hp) {
  const SpectralSolver solver(tm, eig);
  const HiddenSvd& svd = solver.svd();
  const ShrinkageSpectrum zeta = shrinkage_coefficients(svd, eig, hp);
  const Matrix& proj = solver.projected_targets();

  SmoothingReport report;
  report.components.reserve(static_cast<std::size_t>(svd.rank() * eig.size()));
  for (Eigen::Index j = 0; j < eig.size(); ++j) {
    for (Eigen::Index i = 0; i < svd.rank(); ++i) {
      SpectralComponent c;
      c.lambda_index = j;
      c.sigma_index = i;
      c.lambda = eig.eigenvalues(j);
      c.sigma2 = svd.singular_values(i) * svd.singular_values(i);
      c.zeta = zeta.coefficients(i, j);
      c.input_energy = proj(i, j) * proj(i, j);
      c.retained_energy = c.zeta * c.zeta * c.input_energy;
      report.components.push_back(c);
    }
  }
  std::stable_sort(report.components.begin(), report.components.end(),
                   [](const SpectralComponent& a, const SpectralComponent& b) {
                     return a.retained_energy > b.retained_energy;
                   });
  return report;
}

inline void write_smoothing_report_csv(std::ostream& os, const SmoothingReport& report) {
  auto put = [&os](double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    os.write(buf, res.ptr - buf);
  };
  os << "lambda,sigma2,zeta,input_energy,retained_energy\n";
  for (const auto& c : report.components) {
    put(c.lambda);
    os << ',';
    put(c.sigma2);
    os << ',';
    put(c.zeta);
    os << ',';
    put(c.input_energy);
    os << ',';
    put(c.retained_energy);
    os << '\n';
  }
}

/// Which path computes the output weights.
enum class Solver { Dense, Fast, Spectral };

inline std::string_view to_string(Solver s) {
  switch (s) {
    case Solver::Dense: return "dense";
    case Solver::Fast: return "fast";
    case Solver::Spectral: return "spectral";
  }
  return "unknown";
}

inline Solver parse_solver(std::string_view name) {
  if (name == "dense") return Solver::Dense;
  if (name == "fast") return Solver::Fast;
  if (name == "spectral") return Solver::Spectral;
  throw InputError("unknown solver '" + std::string(name) + "' (expected dense, fast or spectral)");
}

inline Matrix train_elmg(const TrainingMatrices& tm, const LaplacianView& lap, const LaplacianEigen& eig,
                         const Hyperparams& hp, Solver solver) {
  switch (solver) {
    case Solver::Dense: return train_elmg_dense(tm, lap, hp);
    case Solver::Fast: return train_elmg_fast(tm, eig, hp);
    case Solver::Spectral: return SpectralSolver(tm, eig).weights(hp);
  }
  throw InputError("unknown solver");
}

}  // namespace elmg
