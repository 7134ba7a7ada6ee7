#pragma once

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "elmg/elmg.hpp"

#ifndef ELMG_VERSION
#define ELMG_VERSION "0.0.0"
#endif

namespace elmg::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumerical = 3 };

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

inline TrainingMatrices load_training(const Matrix& inputs, const std::string& targets, const HiddenLayer& layer) {
  Matrix t = load_signal_matrix(targets);
  elmg::detail::require(inputs.rows() == t.rows(), "inputs have " + std::to_string(inputs.rows()) +
                                                       " rows, targets have " + std::to_string(t.rows()));
  return TrainingMatrices{hidden_matrix(layer, inputs), std::move(t)};
}

struct ModelFlags {
  std::string inputs;
  std::string targets;
  std::string adjacency;
  std::string activation = "sigmoid";
  Eigen::Index k = 100;
  double alpha = 1.0;
  double beta = 0.0;
  std::uint64_t seed = 0;
};

inline void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--inputs", f.inputs, "Input CSV (N x d)")->required();
  cmd->add_option("--targets", f.targets, "Target CSV (N x M)")->required();
  cmd->add_option("--adjacency", f.adjacency, "Adjacency CSV (M x M)")->required();
  cmd->add_option("--activation", f.activation, "sigmoid | hardlimit | gaussian")->capture_default_str();
  cmd->add_option("--k", f.k, "Hidden neurons K")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Ridge weight")->capture_default_str();
  cmd->add_option("--beta", f.beta, "Graph weight")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Hidden-layer seed")->capture_default_str();
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extreme learning machine regression with graph-signal regularization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("elmg ") + ELMG_VERSION + " (C++" +
                                        std::to_string(__cplusplus / 100 % 100) + ", Eigen " +
                                        std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                        std::to_string(EIGEN_MINOR_VERSION) + ")");

  // graph
  std::string coords_path, graph_out;
  auto* graph = app.add_subcommand("graph", "Build a geodesic adjacency from lat,lon coordinates");
  graph->add_option("--coords", coords_path, "Coordinates CSV (lat,lon)")->required();
  graph->add_option("--out", graph_out, "Adjacency CSV to write")->required();

  // synth
  Eigen::Index synth_nodes = 20, synth_samples = 200, synth_dim = 5;
  double synth_tau = 5.0, synth_radius = 0.4;
  std::optional<double> synth_snr;
  std::uint64_t synth_seed = 0;
  std::string synth_dir, synth_adjacency;
  auto* synth = app.add_subcommand("synth", "Generate heat-kernel smooth graph signals");
  synth->add_option("--nodes", synth_nodes, "Nodes of the random geometric graph")->capture_default_str();
  synth->add_option("--adjacency", synth_adjacency, "Use this adjacency CSV instead of a random graph");
  synth->add_option("--radius", synth_radius, "Connection radius of the random graph")->capture_default_str();
  synth->add_option("--samples", synth_samples, "Number of samples")->capture_default_str();
  synth->add_option("--input-dim", synth_dim, "Input dimension d")->capture_default_str();
  synth->add_option("--tau", synth_tau, "Diffusion time")->capture_default_str();
  synth->add_option("--snr-db", synth_snr, "Corrupt targets.csv at this SNR");
  synth->add_option("--seed", synth_seed, "Seed")->capture_default_str();
  synth->add_option("--out-dir", synth_dir, "Directory for the CSV files and manifest.json")->required();

  // train
  detail::ModelFlags train_flags;
  std::string solver_name = "fast", model_out;
  auto* train = app.add_subcommand("train", "Fit an ELM/ELMG model");
  detail::add_model_flags(train, train_flags);
  train->add_option("--solver", solver_name, "dense | fast | spectral")->capture_default_str();
  train->add_option("--model-out", model_out, "Model JSON to write")->required();

  // predict
  std::string predict_model, predict_inputs, predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "Predict targets for new inputs");
  predict_cmd->add_option("--model", predict_model, "Model JSON")->required();
  predict_cmd->add_option("--inputs", predict_inputs, "Input CSV")->required();
  predict_cmd->add_option("--out", predict_out, "Predictions CSV to write")->required();

  // eval
  std::string eval_model, eval_inputs, eval_truth;
  auto* eval = app.add_subcommand("eval", "NMSE of model predictions against truth");
  eval->add_option("--model", eval_model, "Model JSON")->required();
  eval->add_option("--inputs", eval_inputs, "Input CSV")->required();
  eval->add_option("--truth", eval_truth, "Truth CSV")->required();

  // sweep
  std::string sweep_config, sweep_out;
  int sweep_jobs = 1;
  auto* sweep = app.add_subcommand("sweep", "Run a Monte-Carlo ELM vs ELMG experiment");
  sweep->add_option("--config", sweep_config, "Experiment config JSON")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--jobs", sweep_jobs, "Worker threads (a 'jobs' key in the config wins)")->capture_default_str();

  // spectrum
  detail::ModelFlags spec_flags;
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "Shrinkage coefficients of the fitted training map");
  detail::add_model_flags(spectrum, spec_flags);
  spectrum->add_option("--out", spectrum_out, "CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help() << '\n';
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All) << '\n';
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kOk;
  } catch (const CLI::Success&) {
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*graph) {
      out << "seed=none\n";
      const auto coords = load_coordinates(coords_path);
      const Graph g = build_geodesic_graph(coords);
      auto os = detail::open_output(graph_out);
      write_csv_matrix(os, g.adjacency());
      out << "nodes=" << g.num_nodes() << '\n';
    } else if (*synth) {
      out << "seed=" << synth_seed << '\n';
      const Graph g = synth_adjacency.empty()
                          ? random_geometric_graph(synth_nodes, synth_radius, derive_seed(synth_seed, {0xA11}))
                          : load_adjacency(synth_adjacency);
      Dataset ds = synth_smooth_signals(g, synth_samples, synth_dim, synth_tau, derive_seed(synth_seed, {0xDA7A}));
      if (synth_snr) ds.targets = add_noise(*ds.clean_targets, *synth_snr, derive_seed(synth_seed, {2}));
      const std::filesystem::path dir = synth_dir;
      std::filesystem::create_directories(dir);
      save_adjacency(dir / "adjacency.csv", g);
      save_signal_matrix(dir / "inputs.csv", ds.inputs);
      save_signal_matrix(dir / "targets.csv", ds.targets);
      save_signal_matrix(dir / "clean_targets.csv", *ds.clean_targets);
      auto manifest = detail::open_output(dir / "manifest.json");
      manifest << nlohmann::json{{"inputs", "inputs.csv"},
                                 {"targets", "targets.csv"},
                                 {"clean_targets", "clean_targets.csv"},
                                 {"adjacency", "adjacency.csv"}}
                      .dump(2)
               << '\n';
    } else if (*train) {
      const auto& f = train_flags;
      out << "seed=" << f.seed << '\n';
      const Solver solver = parse_solver(solver_name);
      const Graph g = load_adjacency(f.adjacency);
      const Matrix x_all = load_signal_matrix(f.inputs);
      const HiddenLayer layer = init_hidden_layer(f.seed, parse_activation(f.activation), f.k, x_all.cols());
      const TrainingMatrices tm = detail::load_training(x_all, f.targets, layer);
      elmg::detail::require(g.num_nodes() == tm.num_nodes(),
                            "adjacency has " + std::to_string(g.num_nodes()) + " nodes, targets have " +
                                std::to_string(tm.num_nodes()) + " columns");
      const Hyperparams hp{f.alpha, f.beta};
      const LaplacianView lap = laplacian(g);
      const LaplacianEigen eig = laplacian_eigendecomposition(lap);
      ElmModel model{layer, train_elmg(tm, lap, eig, hp, solver), hp, f.seed};
      save_model(model_out, model);
      out << "train_nmse_db=" << format_double(nmse_db(tm.hidden * model.output_weights, tm.targets)) << '\n';
    } else if (*predict_cmd) {
      out << "seed=none\n";
      const ElmModel model = load_model(predict_model);
      const Matrix y = predict(model, load_signal_matrix(predict_inputs));
      auto os = detail::open_output(predict_out);
      write_csv_matrix(os, y);
      out << "rows=" << y.rows() << '\n';
    } else if (*eval) {
      out << "seed=none\n";
      const ElmModel model = load_model(eval_model);
      const Matrix y = predict(model, load_signal_matrix(eval_inputs));
      out << "nmse_db=" << format_double(nmse_db(y, load_signal_matrix(eval_truth))) << '\n';
    } else if (*sweep) {
      const std::filesystem::path cfg_path = sweep_config;
      std::ifstream in(cfg_path);
      if (!in) throw InputError("cannot open '" + cfg_path.string() + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw InputError(cfg_path.string() + ": invalid JSON: " + e.what());
      }
      if (j.is_object() && !j.contains("jobs")) j["jobs"] = sweep_jobs;
      const ExperimentConfig config = parse_experiment_config(j, cfg_path.parent_path());
      out << "seed=" << config.seed << '\n';
      const ExperimentResult result = run_experiment(config);
      write_experiment_outputs(sweep_out, result);
      write_results_csv(out, result);
    } else if (*spectrum) {
      const auto& f = spec_flags;
      out << "seed=" << f.seed << '\n';
      const Graph g = load_adjacency(f.adjacency);
      const Matrix x_all = load_signal_matrix(f.inputs);
      const HiddenLayer layer = init_hidden_layer(f.seed, parse_activation(f.activation), f.k, x_all.cols());
      const TrainingMatrices tm = detail::load_training(x_all, f.targets, layer);
      elmg::detail::require(g.num_nodes() == tm.num_nodes(), "adjacency and targets disagree on the node count");
      const SmoothingReport report =
          smoothing_report(tm, laplacian_eigendecomposition(laplacian(g)), Hyperparams{f.alpha, f.beta});
      auto os = detail::open_output(spectrum_out);
      write_smoothing_report_csv(os, report);
      out << "components=" << report.components.size() << '\n';
    }
  } catch (const SingularityError& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kNumerical;
  } catch (const ExperimentError& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kNumerical;
  } catch (const InputError& e) {
    err << "error[input]: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error[numerical]: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error[input]: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}

}  // namespace elmg::cli
