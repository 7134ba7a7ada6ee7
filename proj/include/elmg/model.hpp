#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "errors.hpp"
#include "graph.hpp"

namespace elmg {

enum class ActivationKind { Sigmoid, Hardlimit, Gaussian };

inline std::string_view to_string(ActivationKind k) {
  switch (k) {
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Hardlimit: return "hardlimit";
    case ActivationKind::Gaussian: return "gaussian";
  }
  return "unknown";
}

inline ActivationKind parse_activation(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "hardlimit") return ActivationKind::Hardlimit;
  if (name == "gaussian") return ActivationKind::Gaussian;
  throw InputError("unknown activation '" + std::string(name) + "' (expected sigmoid, hardlimit or gaussian)");
}

/// G(x, a, b) for one hidden unit.
inline double activation_eval(ActivationKind kind, const Eigen::Ref<const Vector>& x,
                              const Eigen::Ref<const Vector>& a, double b) {
  detail::require(x.size() == a.size(), "activation: input has " + std::to_string(x.size()) +
                                            " entries, weight vector has " + std::to_string(a.size()));
  switch (kind) {
    case ActivationKind::Sigmoid: return 1.0 / (1.0 + std::exp(-(a.dot(x) + b)));
    case ActivationKind::Hardlimit: return a.dot(x) + b >= 0.0 ? 1.0 : 0.0;
    case ActivationKind::Gaussian: return std::exp(-b * (x - a).squaredNorm());
  }
  return 0.0;
}

/// K random units over d-dimensional inputs. Row k of `weights` is a_k.
struct HiddenLayer {
  ActivationKind kind = ActivationKind::Sigmoid;
  Matrix weights;
  Vector offsets;

  [[nodiscard]] Eigen::Index num_neurons() const { return weights.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return weights.cols(); }
};

/// Every weight and offset is an independent N(0, 1) draw. Weights are drawn
/// row by row, then the offsets.
inline HiddenLayer init_hidden_layer(std::uint64_t seed, ActivationKind kind, Eigen::Index num_neurons,
                                     Eigen::Index input_dim) {
  detail::require(num_neurons >= 1, "hidden layer: need K >= 1");
  detail::require(input_dim >= 1, "hidden layer: need d >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  HiddenLayer layer{kind, Matrix(num_neurons, input_dim), Vector(num_neurons)};
  for (Eigen::Index k = 0; k < num_neurons; ++k)
    for (Eigen::Index j = 0; j < input_dim; ++j) layer.weights(k, j) = normal(rng);
  for (Eigen::Index k = 0; k < num_neurons; ++k) layer.offsets(k) = normal(rng);
  return layer;
}

/// H with H(n, k) = G(x_n, a_k, b_k).
inline Matrix hidden_matrix(const HiddenLayer& layer, const Matrix& inputs) {
  detail::require(inputs.cols() == layer.input_dim(),
                  "hidden_matrix: inputs have " + std::to_string(inputs.cols()) + " columns, layer expects " +
                      std::to_string(layer.input_dim()));
  const Eigen::Index n = inputs.rows();
  const Eigen::Index k = layer.num_neurons();
  Matrix h(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Vector a = layer.weights.row(c).transpose();
    for (Eigen::Index r = 0; r < n; ++r)
      h(r, c) = activation_eval(layer.kind, inputs.row(r).transpose(), a, layer.offsets(c));
  }
  return h;
}

struct Hyperparams {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    detail::require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be finite and >= 0");
    detail::require(std::isfinite(beta) && beta >= 0.0, "beta must be finite and >= 0");
  }
};

struct TrainingMatrices {
  Matrix hidden;   // H, N x K
  Matrix targets;  // T, N x M

  void validate() const {
    detail::require(hidden.rows() == targets.rows(),
                    "training matrices: H has " + std::to_string(hidden.rows()) + " rows, T has " +
                        std::to_string(targets.rows()));
    detail::require(hidden.rows() >= 1 && hidden.cols() >= 1 && targets.cols() >= 1,
                    "training matrices: empty H or T");
    detail::require(hidden.allFinite() && targets.allFinite(), "training matrices: non-finite entries");
  }
  [[nodiscard]] Eigen::Index num_samples() const { return hidden.rows(); }
  [[nodiscard]] Eigen::Index num_neurons() const { return hidden.cols(); }
  [[nodiscard]] Eigen::Index num_nodes() const { return targets.cols(); }
};

namespace detail {

inline std::string format_condition(double rcond) {
  std::ostringstream os;
  os.precision(3);
  if (rcond > 0.0)
    os << "condition estimate " << std::scientific << 1.0 / rcond;
  else
    os << "condition estimate inf";
  return os.str();
}

/// Cholesky of a symmetric positive semidefinite system; throws when the
/// factor fails or the reciprocal condition falls below n * eps.
inline Eigen::LLT<Matrix> spd_factor(const Matrix& system, const std::string& context) {
  Eigen::LLT<Matrix> llt(system);
  const double eps = std::numeric_limits<double>::epsilon();
  if (llt.info() != Eigen::Success) throw SingularityError(context + ": system is singular (" + format_condition(0.0) + ")");
  const double rcond = llt.rcond();
  if (!(rcond > static_cast<double>(system.rows()) * eps))
    throw SingularityError(context + ": system is singular (" + format_condition(rcond) + ")");
  return llt;
}

}  // namespace detail

/// Ridge ELM: W = (H^T H + alpha I_K)^{-1} H^T T.
inline Matrix train_elm(const TrainingMatrices& tm, double alpha) {
  tm.validate();
  Hyperparams{alpha, 0.0}.validate();
  Matrix gram = tm.hidden.transpose() * tm.hidden;
  gram.diagonal().array() += alpha;
  const auto llt = detail::spd_factor(gram, "train_elm");
  return llt.solve(tm.hidden.transpose() * tm.targets);
}

inline constexpr Eigen::Index kDefaultDenseCap = 4000;

/// I_M (x) (H^T H + alpha I_K) + beta L (x) H^T H, the KM x KM system acting
/// on vec(W).
inline Matrix elmg_system_matrix(const Matrix& gram, const Matrix& lap, const Hyperparams& hp) {
  const Eigen::Index k = gram.rows();
  const Eigen::Index m = lap.rows();
  Matrix system(k * m, k * m);
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      auto block = system.block(i * k, j * k, k, k);
      block = hp.beta * lap(i, j) * gram;
      if (i == j) {
        block += gram;
        block.diagonal().array() += hp.alpha;
      }
    }
  }
  return system;
}

/// Graph-regularized weights by solving the full Kronecker system.
/// Guarded by `cap` on K * M; use train_elmg_fast beyond it.
inline Matrix train_elmg_dense(const TrainingMatrices& tm, const LaplacianView& lap, const Hyperparams& hp,
                               Eigen::Index cap = kDefaultDenseCap) {
  tm.validate();
  hp.validate();
  detail::require(lap.matrix.rows() == tm.num_nodes() && lap.matrix.cols() == tm.num_nodes(),
                  "train_elmg_dense: Laplacian is " + std::to_string(lap.matrix.rows()) + "x" +
                      std::to_string(lap.matrix.cols()) + ", targets have " + std::to_string(tm.num_nodes()) +
                      " columns");
  const Eigen::Index k = tm.num_neurons();
  const Eigen::Index m = tm.num_nodes();
  if (k * m > cap)
    throw SizeError("train_elmg_dense: K*M = " + std::to_string(k * m) + " exceeds the dense cap " +
                    std::to_string(cap) + "; use the fast solver");

  const Matrix gram = tm.hidden.transpose() * tm.hidden;
  const Matrix system = elmg_system_matrix(gram, lap.matrix, hp);
  const auto llt = detail::spd_factor(system, "train_elmg_dense");
  const Matrix rhs = tm.hidden.transpose() * tm.targets;
  const Vector vec_w = llt.solve(rhs.reshaped());
  return vec_w.reshaped(k, m);
}

/// Graph-regularized weights through the Laplacian eigenbasis. With W = W~ V^T,
/// column j of W~ solves [(1 + beta lambda_j) H^T H + alpha I] w~_j = (H^T T V)_j.
inline Matrix train_elmg_fast(const TrainingMatrices& tm, const LaplacianEigen& eig, const Hyperparams& hp) {
  tm.validate();
  hp.validate();
  detail::require(eig.size() == tm.num_nodes(), "train_elmg_fast: eigendecomposition has " +
                                                    std::to_string(eig.size()) + " nodes, targets have " +
                                                    std::to_string(tm.num_nodes()));
  const Eigen::Index k = tm.num_neurons();
  const Eigen::Index m = tm.num_nodes();
  const Matrix gram = tm.hidden.transpose() * tm.hidden;
  const Matrix rhs = tm.hidden.transpose() * tm.targets * eig.eigenvectors;

  Matrix rotated(k, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double lam = eig.eigenvalues(j);
    Matrix system = (1.0 + hp.beta * lam) * gram;
    system.diagonal().array() += hp.alpha;
    std::ostringstream ctx;
    ctx << "train_elmg_fast: eigen-subproblem j=" << j << " (lambda=" << lam << ")";
    const auto llt = detail::spd_factor(system, ctx.str());
    rotated.col(j) = llt.solve(rhs.col(j));
  }
  return rotated * eig.eigenvectors.transpose();
}

/// ||T - HW||_F^2 + alpha tr(W^T W) + beta tr(W^T H^T H W L).
inline double elmg_cost(const TrainingMatrices& tm, const Matrix& lap, const Hyperparams& hp, const Matrix& w) {
  const Matrix fit = tm.hidden * w;
  return (tm.targets - fit).squaredNorm() + hp.alpha * w.squaredNorm() +
         hp.beta * (fit * lap).cwiseProduct(fit).sum();
}

/// 2 [ -H^T T + (H^T H + alpha I) W + beta H^T H W L ].
inline Matrix elmg_gradient(const TrainingMatrices& tm, const Matrix& lap, const Hyperparams& hp, const Matrix& w) {
  const Matrix gram = tm.hidden.transpose() * tm.hidden;
  return 2.0 * (-tm.hidden.transpose() * tm.targets + gram * w + hp.alpha * w + hp.beta * gram * w * lap);
}

/// ||(H^T H + alpha I) W + beta H^T H W L - H^T T||_F / ||H^T T||_F.
inline double stationarity_residual(const TrainingMatrices& tm, const Matrix& lap, const Hyperparams& hp,
                                    const Matrix& w) {
  const Matrix rhs = tm.hidden.transpose() * tm.targets;
  const Matrix gram = tm.hidden.transpose() * tm.hidden;
  const Matrix lhs = gram * w + hp.alpha * w + hp.beta * gram * w * lap;
  const double denom = rhs.norm();
  return denom > 0.0 ? (lhs - rhs).norm() / denom : (lhs - rhs).norm();
}

/// A hidden layer with trained K x M output weights.
struct ElmModel {
  HiddenLayer hidden;
  Matrix output_weights;
  Hyperparams hyperparams;
  std::uint64_t seed = 0;

  [[nodiscard]] Eigen::Index num_nodes() const { return output_weights.cols(); }
};

/// Row n of the result is W^T h(x_n).
inline Matrix predict(const ElmModel& model, const Matrix& inputs) {
  detail::require(model.output_weights.rows() == model.hidden.num_neurons(),
                  "predict: output weights have " + std::to_string(model.output_weights.rows()) +
                      " rows, hidden layer has " + std::to_string(model.hidden.num_neurons()) + " neurons");
  return hidden_matrix(model.hidden, inputs) * model.output_weights;
}

}  // namespace elmg
