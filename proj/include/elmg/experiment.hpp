#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "data_io.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "model.hpp"
#include "spectral.hpp"

namespace elmg {

inline constexpr double kNmseFloorDb = -200.0;

/// 10 log10(||predicted - truth||_F^2 / ||truth||_F^2), floored at -200 dB.
inline double nmse_db(const Matrix& predicted, const Matrix& truth) {
  detail::require(predicted.rows() == truth.rows() && predicted.cols() == truth.cols(),
                  "nmse: shapes differ (" + std::to_string(predicted.rows()) + "x" +
                      std::to_string(predicted.cols()) + " vs " + std::to_string(truth.rows()) + "x" +
                      std::to_string(truth.cols()) + ")");
  const double signal = truth.squaredNorm();
  if (!(signal > 0.0)) throw InputError("nmse: truth has zero energy");
  return std::max(kNmseFloorDb, 10.0 * std::log10((predicted - truth).squaredNorm() / signal));
}

/// {0} U {10^k : k = -6..4}.
inline std::vector<double> default_grid() {
  std::vector<double> g{0.0};
  for (int k = -6; k <= 4; ++k) g.push_back(std::pow(10.0, k));
  return g;
}

/// Derives a decorrelated 64-bit seed from a parent seed and a path of
/// indices.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(parent), static_cast<std::uint32_t>(parent >> 32)};
  for (auto p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

// ---------------------------------------------------------------------------
// Validation folds and grid search
// ---------------------------------------------------------------------------

struct Fold {
  std::vector<Eigen::Index> fit;
  std::vector<Eigen::Index> validate;
};

inline constexpr Eigen::Index kLeaveOneOutMax = 8;

/// Leave-one-out for n <= 8, otherwise a single random hold-out of
/// round(fraction * n) rows (at least one, leaving at least one to fit).
inline std::vector<Fold> validation_folds(Eigen::Index n, double fraction, std::uint64_t seed) {
  detail::require(n >= 2, "grid search: need at least 2 training rows to hold out validation, got " +
                              std::to_string(n));
  detail::require(fraction > 0.0 && fraction < 1.0, "grid search: validation fraction must be in (0, 1)");
  std::vector<Fold> folds;
  if (n <= kLeaveOneOutMax) {
    for (Eigen::Index v = 0; v < n; ++v) {
      Fold f;
      for (Eigen::Index i = 0; i < n; ++i) (i == v ? f.validate : f.fit).push_back(i);
      folds.push_back(std::move(f));
    }
    return folds;
  }
  auto n_val = static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
  n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
  SplitIndices s = random_partition(n, n - n_val, seed);
  folds.push_back(Fold{std::move(s.train), std::move(s.test)});
  return folds;
}

struct GridScore {
  double alpha = 0.0;
  double beta = 0.0;
  bool feasible = false;
  double validation_nmse_db = std::numeric_limits<double>::infinity();
};

struct GridSearchResult {
  Hyperparams best;
  double best_validation_nmse_db = std::numeric_limits<double>::infinity();
  /// Best pair restricted to beta = 0 (plain ridge ELM) when 0 is in the beta grid.
  std::optional<Hyperparams> best_ridge;
  double best_ridge_validation_nmse_db = std::numeric_limits<double>::infinity();
  std::vector<GridScore> scores;  // beta-major, both grids ascending
};

namespace detail {

inline std::vector<double> sorted_grid(std::vector<double> g, const char* name) {
  require(!g.empty(), std::string("grid search: ") + name + " grid is empty");
  for (double v : g) require(std::isfinite(v) && v >= 0.0, std::string("grid search: ") + name + " grid has invalid value");
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

}  // namespace detail

/// Exhaustive search over alpha x beta scored by pooled validation NMSE
/// against the (noisy) validation targets. Ties go to the smaller beta, then
/// the smaller alpha. Pairs whose system is singular are skipped.
inline GridSearchResult grid_search(const Dataset& train, const LaplacianView& lap, const LaplacianEigen& eig,
                                    const HiddenLayer& layer, std::vector<double> alphas, std::vector<double> betas,
                                    double validation_fraction, std::uint64_t seed, Solver solver = Solver::Spectral) {
  train.validate();
  alphas = detail::sorted_grid(std::move(alphas), "alpha");
  betas = detail::sorted_grid(std::move(betas), "beta");
  const auto folds = validation_folds(train.size(), validation_fraction, seed);
  const Matrix hidden = hidden_matrix(layer, train.inputs);

  const std::size_t num_pairs = alphas.size() * betas.size();
  std::vector<double> residual(num_pairs, 0.0);
  std::vector<char> feasible(num_pairs, 1);
  double truth_energy = 0.0;

  for (const Fold& fold : folds) {
    const TrainingMatrices tm{hidden(fold.fit, Eigen::all),
                              train.targets(fold.fit, Eigen::all)};
    const Matrix h_val = hidden(fold.validate, Eigen::all);
    const Matrix t_val = train.targets(fold.validate, Eigen::all);
    truth_energy += t_val.squaredNorm();
    std::optional<SpectralSolver> spectral;
    if (solver == Solver::Spectral) spectral.emplace(tm, eig);

    for (std::size_t b = 0; b < betas.size(); ++b) {
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        const std::size_t p = b * alphas.size() + a;
        if (!feasible[p]) continue;
        const Hyperparams hp{alphas[a], betas[b]};
        try {
          const Matrix w = spectral ? spectral->weights(hp) : train_elmg(tm, lap, eig, hp, solver);
          residual[p] += (h_val * w - t_val).squaredNorm();
        } catch (const SingularityError&) {
          feasible[p] = 0;
        }
      }
    }
  }
  if (!(truth_energy > 0.0)) throw InputError("grid search: validation targets have zero energy");

  GridSearchResult out;
  bool any = false;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    for (std::size_t a = 0; a < alphas.size(); ++a) {
      const std::size_t p = b * alphas.size() + a;
      GridScore s{alphas[a], betas[b], feasible[p] != 0, std::numeric_limits<double>::infinity()};
      if (s.feasible) {
        s.validation_nmse_db = std::max(kNmseFloorDb, 10.0 * std::log10(residual[p] / truth_energy));
        // strict improvement keeps the earlier (smaller beta, then alpha) pair on ties
        if (!any || s.validation_nmse_db < out.best_validation_nmse_db) {
          out.best = {s.alpha, s.beta};
          out.best_validation_nmse_db = s.validation_nmse_db;
          any = true;
        }
        if (s.beta == 0.0 && (!out.best_ridge || s.validation_nmse_db < out.best_ridge_validation_nmse_db)) {
          out.best_ridge = Hyperparams{s.alpha, 0.0};
          out.best_ridge_validation_nmse_db = s.validation_nmse_db;
        }
      }
      out.scores.push_back(s);
    }
  }
  if (!any) throw SingularityError("grid search: every (alpha, beta) pair gives a singular system");
  return out;
}

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct SyntheticSource {
  Eigen::Index nodes = 20;
  double radius = 0.4;
  double tau = 5.0;
  Eigen::Index input_dim = 5;
  Eigen::Index pool_size = 200;
};

struct ManifestSource {
  std::filesystem::path path;
};

struct ExperimentConfig {
  std::vector<ActivationKind> activations{ActivationKind::Sigmoid};
  std::vector<Eigen::Index> neuron_counts{100};
  std::vector<Eigen::Index> train_sizes{4, 16, 30};
  double snr_db = 5.0;
  NoiseScope noise_scope = NoiseScope::DatasetWide;
  int trials = 100;
  std::vector<double> alpha_grid = default_grid();
  std::vector<double> beta_grid = default_grid();
  std::uint64_t seed = 1;
  double validation_fraction = 0.25;
  Solver solver = Solver::Spectral;
  int jobs = 1;
  std::optional<SyntheticSource> synthetic = SyntheticSource{};
  std::optional<ManifestSource> manifest;

  void validate() const {
    detail::require(trials >= 1, "config: trials must be >= 1");
    detail::require(!activations.empty(), "config: activation list is empty");
    detail::require(!neuron_counts.empty() && !train_sizes.empty(), "config: K and N lists must be non-empty");
    for (auto k : neuron_counts) detail::require(k >= 1, "config: K values must be >= 1");
    for (auto n : train_sizes) detail::require(n >= 2, "config: N values must be >= 2");
    detail::require(!alpha_grid.empty() && !beta_grid.empty(), "config: grids must be non-empty");
    detail::require(std::find(beta_grid.begin(), beta_grid.end(), 0.0) != beta_grid.end(),
                    "config: beta grid must contain 0");
    detail::require(std::isfinite(snr_db), "config: snr_db must be finite");
    detail::require(validation_fraction > 0.0 && validation_fraction < 1.0,
                    "config: validation_fraction must be in (0, 1)");
    detail::require(jobs >= 1, "config: jobs must be >= 1");
    detail::require(synthetic.has_value() != manifest.has_value(), "config: exactly one data source required");
  }
};

namespace detail {

template <typename T>
std::vector<T> json_list(const nlohmann::json& j, const char* key) {
  if (j.is_array()) return j.get<std::vector<T>>();
  if (j.is_number()) return {j.get<T>()};
  throw InputError(std::string("config: '") + key + "' must be a number or a list");
}

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw InputError(where + ": unknown key '" + it.key() + "'");
}

}  // namespace detail

/// Parses an experiment config document. Relative manifest paths resolve
/// against `base_dir`.
inline ExperimentConfig parse_experiment_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  if (!j.is_object()) throw InputError("config: top level must be an object");
  detail::reject_unknown(j,
                         {"activation", "K", "N", "snr_db", "noise_scope", "trials", "alpha_grid", "beta_grid",
                          "seed", "validation_fraction", "solver", "jobs", "data"},
                         "config");
  ExperimentConfig c;
  try {
    if (j.contains("activation")) {
      c.activations.clear();
      const auto& a = j["activation"];
      if (a.is_string()) {
        c.activations.push_back(parse_activation(a.get<std::string>()));
      } else {
        for (const auto& s : a) c.activations.push_back(parse_activation(s.get<std::string>()));
      }
    }
    if (j.contains("K")) c.neuron_counts = detail::json_list<Eigen::Index>(j["K"], "K");
    if (j.contains("N")) c.train_sizes = detail::json_list<Eigen::Index>(j["N"], "N");
    if (j.contains("snr_db")) c.snr_db = j["snr_db"].get<double>();
    if (j.contains("noise_scope")) {
      const auto s = j["noise_scope"].get<std::string>();
      if (s == "dataset") c.noise_scope = NoiseScope::DatasetWide;
      else if (s == "sample") c.noise_scope = NoiseScope::PerSample;
      else throw InputError("config: noise_scope must be 'dataset' or 'sample'");
    }
    if (j.contains("trials")) c.trials = j["trials"].get<int>();
    if (j.contains("alpha_grid")) c.alpha_grid = detail::json_list<double>(j["alpha_grid"], "alpha_grid");
    if (j.contains("beta_grid")) c.beta_grid = detail::json_list<double>(j["beta_grid"], "beta_grid");
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("validation_fraction")) c.validation_fraction = j["validation_fraction"].get<double>();
    if (j.contains("solver")) c.solver = parse_solver(j["solver"].get<std::string>());
    if (j.contains("jobs")) c.jobs = j["jobs"].get<int>();
    if (j.contains("data")) {
      const auto& d = j["data"];
      const auto type = d.value("type", std::string("synthetic"));
      if (type == "synthetic") {
        detail::reject_unknown(d, {"type", "nodes", "radius", "tau", "input_dim", "pool_size"}, "config.data");
        SyntheticSource s;
        s.nodes = d.value("nodes", s.nodes);
        s.radius = d.value("radius", s.radius);
        s.tau = d.value("tau", s.tau);
        s.input_dim = d.value("input_dim", s.input_dim);
        s.pool_size = d.value("pool_size", s.pool_size);
        c.synthetic = s;
        c.manifest.reset();
      } else if (type == "manifest") {
        detail::reject_unknown(d, {"type", "path"}, "config.data");
        std::filesystem::path p = d.at("path").get<std::string>();
        c.manifest = ManifestSource{p.is_absolute() ? p : base_dir / p};
        c.synthetic.reset();
      } else {
        throw InputError("config.data: type must be 'synthetic' or 'manifest'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

/// Sample pool and graph shared by every trial of an experiment.
struct ExperimentData {
  Dataset pool;  // truth() gives the clean targets
  Graph graph;
  LaplacianView lap;
  LaplacianEigen eig;

  ExperimentData(Dataset ds, Graph g)
      : pool(std::move(ds)), graph(std::move(g)), lap(laplacian(graph)), eig(laplacian_eigendecomposition(lap)) {
    pool.validate();
    detail::require(graph.num_nodes() == pool.targets.cols(), "experiment: graph and targets disagree on M");
  }
};

inline ExperimentData prepare_experiment_data(const ExperimentConfig& config) {
  if (config.manifest) {
    ManifestData md = load_manifest(config.manifest->path);
    if (!md.graph) throw InputError("experiment: manifest must name an adjacency file");
    return ExperimentData(std::move(md.dataset), std::move(*md.graph));
  }
  const SyntheticSource& s = *config.synthetic;
  Graph g = random_geometric_graph(s.nodes, s.radius, derive_seed(config.seed, {0xA11}));
  Dataset ds = synth_smooth_signals(g, s.pool_size, s.input_dim, s.tau, derive_seed(config.seed, {0xDA7A}));
  return ExperimentData(std::move(ds), std::move(g));
}

struct TrialCell {
  ActivationKind activation = ActivationKind::Sigmoid;
  Eigen::Index num_neurons = 100;
  Eigen::Index num_train = 4;
};

struct TrialOutcome {
  std::uint64_t seed = 0;
  double nmse_elm_db = 0.0;
  double nmse_elmg_db = 0.0;
  Hyperparams elm;    // beta is always 0
  Hyperparams elmg;
  double validation_elm_db = 0.0;
  double validation_elmg_db = 0.0;
};

/// One pass of the protocol: split, corrupt the training targets, draw a
/// hidden layer, grid-search both methods on shared folds, refit on the
/// whole training fold and score against the clean test targets.
inline TrialOutcome run_trial(const ExperimentData& data, const ExperimentConfig& config, const TrialCell& cell,
                              std::uint64_t trial_seed) {
  try {
    const auto [train_clean, test] =
        split_dataset(data.pool, cell.num_train, derive_seed(trial_seed, {1}));
    Dataset train = train_clean;
    train.targets = add_noise(train_clean.truth(), config.snr_db, derive_seed(trial_seed, {2}), config.noise_scope);

    const HiddenLayer layer = init_hidden_layer(derive_seed(trial_seed, {3}), cell.activation, cell.num_neurons,
                                                train.inputs.cols());
    const GridSearchResult gs = grid_search(train, data.lap, data.eig, layer, config.alpha_grid, config.beta_grid,
                                            config.validation_fraction, derive_seed(trial_seed, {4}), config.solver);
    if (!gs.best_ridge) throw SingularityError("no feasible beta = 0 pair");

    const TrainingMatrices tm{hidden_matrix(layer, train.inputs), train.targets};
    const Matrix w_elm = train_elm(tm, gs.best_ridge->alpha);
    const Matrix w_elmg = gs.best.beta == 0.0 ? train_elm(tm, gs.best.alpha)
                                              : train_elmg(tm, data.lap, data.eig, gs.best, config.solver);

    const Matrix h_test = hidden_matrix(layer, test.inputs);
    TrialOutcome out;
    out.seed = trial_seed;
    out.nmse_elm_db = nmse_db(h_test * w_elm, test.truth());
    out.nmse_elmg_db = nmse_db(h_test * w_elmg, test.truth());
    out.elm = *gs.best_ridge;
    out.elmg = gs.best;
    out.validation_elm_db = gs.best_ridge_validation_nmse_db;
    out.validation_elmg_db = gs.best_validation_nmse_db;
    return out;
  } catch (const SingularityError& e) {
    throw SingularityError(std::string(e.what()) + " [trial seed " + std::to_string(trial_seed) + "]");
  } catch (const InputError& e) {
    throw InputError(std::string(e.what()) + " [trial seed " + std::to_string(trial_seed) + "]");
  }
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

struct ResultRow {
  ActivationKind activation;
  Eigen::Index num_neurons;
  Eigen::Index num_train;
  std::string method;  // "ELM" or "ELMG"
  double mean_nmse_db;
  double std_nmse_db;
  int trials;
};

struct TrialRecord {
  TrialCell cell;
  int index = 0;
  TrialOutcome outcome;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<TrialRecord> trials;
};

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Sample standard deviation; 0 for a single value.
inline double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline constexpr double kMaxFailedTrialFraction = 0.2;

inline std::uint64_t trial_seed_for(const ExperimentConfig& config, std::size_t activation_index,
                                    const TrialCell& cell, int trial) {
  return derive_seed(config.seed, {0x7121A1, static_cast<std::uint64_t>(activation_index),
                                   static_cast<std::uint64_t>(cell.num_neurons),
                                   static_cast<std::uint64_t>(cell.num_train), static_cast<std::uint64_t>(trial)});
}

/// R trials per (activation, K, N) cell. Trials run on up to `config.jobs`
/// threads; results are reduced in trial-index order.
inline ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentData& data) {
  config.validate();
  ExperimentResult result;
  for (std::size_t ai = 0; ai < config.activations.size(); ++ai) {
    for (const auto k : config.neuron_counts) {
      for (const auto n : config.train_sizes) {
        const TrialCell cell{config.activations[ai], k, n};
        const auto r = static_cast<std::size_t>(config.trials);
        std::vector<std::optional<TrialOutcome>> outcomes(r);
        std::vector<std::string> failures(r);

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
          for (std::size_t t = next++; t < r; t = next++) {
            const auto seed = trial_seed_for(config, ai, cell, static_cast<int>(t));
            try {
              outcomes[t] = run_trial(data, config, cell, seed);
            } catch (const Error& e) {
              failures[t] = e.what();
            }
          }
        };
        const auto nthreads = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), r);
        if (nthreads <= 1) {
          worker();
        } else {
          std::vector<std::jthread> pool;
          for (std::size_t i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        }

        std::vector<double> elm, elmg;
        std::vector<std::string> messages;
        for (std::size_t t = 0; t < r; ++t) {
          if (outcomes[t]) {
            elm.push_back(outcomes[t]->nmse_elm_db);
            elmg.push_back(outcomes[t]->nmse_elmg_db);
            result.trials.push_back(TrialRecord{cell, static_cast<int>(t), *outcomes[t]});
          } else {
            messages.push_back(failures[t]);
          }
        }
        const std::string where = std::string(to_string(cell.activation)) + " K=" + std::to_string(k) +
                                  " N=" + std::to_string(n);
        if (static_cast<double>(messages.size()) > kMaxFailedTrialFraction * static_cast<double>(r) || elm.empty()) {
          std::string msg = "experiment: " + std::to_string(messages.size()) + " of " + std::to_string(r) +
                            " trials failed in cell " + where;
          for (std::size_t i = 0; i < std::min<std::size_t>(3, messages.size()); ++i) msg += "\n  " + messages[i];
          throw ExperimentError(msg);
        }
        const int ok = static_cast<int>(elm.size());
        result.rows.push_back({cell.activation, k, n, "ELM", mean_of(elm), stddev_of(elm), ok});
        result.rows.push_back({cell.activation, k, n, "ELMG", mean_of(elmg), stddev_of(elmg), ok});
      }
    }
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, prepare_experiment_data(config));
}

// ---------------------------------------------------------------------------
// Result emission
// ---------------------------------------------------------------------------

inline void write_results_csv(std::ostream& os, const ExperimentResult& r) {
  os << "activation,K,N,method,mean_nmse_db,std_nmse_db,R\n";
  for (const auto& row : r.rows)
    os << to_string(row.activation) << ',' << row.num_neurons << ',' << row.num_train << ',' << row.method << ','
       << format_double(row.mean_nmse_db) << ',' << format_double(row.std_nmse_db) << ',' << row.trials << '\n';
}

/// Long format for NMSE-vs-N curves: one line per (activation, K, method, N).
inline void write_curves_csv(std::ostream& os, const ExperimentResult& r) {
  std::vector<ResultRow> rows = r.rows;
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.activation, a.num_neurons, a.method, a.num_train) <
           std::tie(b.activation, b.num_neurons, b.method, b.num_train);
  });
  os << "activation,K,method,N,mean_nmse_db,std_nmse_db\n";
  for (const auto& row : rows)
    os << to_string(row.activation) << ',' << row.num_neurons << ',' << row.method << ',' << row.num_train << ','
       << format_double(row.mean_nmse_db) << ',' << format_double(row.std_nmse_db) << '\n';
}

inline void write_trials_csv(std::ostream& os, const ExperimentResult& r) {
  os << "activation,K,N,trial,seed,nmse_elm_db,nmse_elmg_db,alpha_elm,alpha_elmg,beta_elmg,"
        "validation_elm_db,validation_elmg_db\n";
  for (const auto& t : r.trials) {
    const auto& o = t.outcome;
    os << to_string(t.cell.activation) << ',' << t.cell.num_neurons << ',' << t.cell.num_train << ',' << t.index
       << ',' << o.seed << ',' << format_double(o.nmse_elm_db) << ',' << format_double(o.nmse_elmg_db) << ','
       << format_double(o.elm.alpha) << ',' << format_double(o.elmg.alpha) << ',' << format_double(o.elmg.beta)
       << ',' << format_double(o.validation_elm_db) << ',' << format_double(o.validation_elmg_db) << '\n';
  }
}

/// Writes results.csv, curves.csv and trials.csv into `dir`.
inline void write_experiment_outputs(const std::filesystem::path& dir, const ExperimentResult& r) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw InputError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  auto results = open("results.csv");
  write_results_csv(results, r);
  auto curves = open("curves.csv");
  write_curves_csv(curves, r);
  auto trials = open("trials.csv");
  write_trials_csv(trials, r);
}

}  // namespace elmg
