#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "elmg_cli.hpp"
#include "test_support.hpp"

namespace elmg {
namespace {

using testing::temp_dir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "elmg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Small synthetic problem written to disk through the synth subcommand.
std::filesystem::path synth_fixture(const std::string& name, int samples = 12) {
  const auto dir = temp_dir(name);
  const auto r = run_cli({"synth", "--nodes", "5", "--radius", "0.7", "--samples", std::to_string(samples),
                          "--input-dim", "3", "--tau", "1", "--snr-db", "5", "--seed", "3", "--out-dir",
                          dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

TEST(CliGraph, TwoCities) {
  const auto dir = temp_dir("cli_graph");
  write_text(dir / "coords.csv", "lat,lon\n59.33,18.07\n57.71,11.97\n");
  const auto r = run_cli({"graph", "--coords", (dir / "coords.csv").string(), "--out", (dir / "adj.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seed="), std::string::npos);
  const Matrix a = load_signal_matrix(dir / "adj.csv");
  EXPECT_NEAR(a(0, 1), std::exp(-0.5), 1e-15);
  EXPECT_EQ(a(0, 0), 0.0);
  // reload equals the in-memory graph
  const Graph g = build_geodesic_graph(load_coordinates(dir / "coords.csv"));
  EXPECT_EQ(a, g.adjacency());
}

TEST(CliGraph, MissingFileIsUsageError) {
  const auto r = run_cli({"graph", "--coords", "/no/such/coords.csv", "--out", "/tmp/x.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error[input]: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("/no/such/coords.csv"), std::string::npos);
}

TEST(Cli, UnknownFlagAndSubcommand) {
  EXPECT_EQ(run_cli({"graph", "--coords", "a", "--out", "b", "--bogus", "1"}).code, 2);
  EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  const auto v = run_cli({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("elmg"), std::string::npos);
}

TEST(CliTrain, BetaZeroSolversAgree) {
  const auto dir = synth_fixture("cli_train_beta0");
  std::vector<Matrix> preds;
  for (const char* solver : {"dense", "fast", "spectral"}) {
    const auto model = dir / (std::string("model_") + solver + ".json");
    const auto r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets",
                            (dir / "targets.csv").string(), "--adjacency", (dir / "adjacency.csv").string(),
                            "--activation", "sigmoid", "--k", "8", "--alpha", "0.1", "--beta", "0", "--seed", "5",
                            "--solver", solver, "--model-out", model.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("seed=5"), std::string::npos);
    preds.push_back(predict(load_model(model), load_signal_matrix(dir / "inputs.csv")));
  }
  EXPECT_LT(testing::rel_err(preds[1], preds[0]), 1e-10);
  EXPECT_LT(testing::rel_err(preds[2], preds[0]), 1e-10);
}

TEST(CliTrain, PredictAndEvalRoundTrip) {
  const auto dir = synth_fixture("cli_roundtrip");
  const auto model = dir / "model.json";
  auto r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets", (dir / "targets.csv").string(),
                    "--adjacency", (dir / "adjacency.csv").string(), "--k", "6", "--alpha", "0.01", "--beta", "2",
                    "--seed", "11", "--model-out", model.string()});
  ASSERT_EQ(r.code, 0) << r.err;

  const Matrix x = load_signal_matrix(dir / "inputs.csv");
  const Matrix t = load_signal_matrix(dir / "targets.csv");
  const ElmModel m = load_model(model);
  EXPECT_EQ(m.hidden.num_neurons(), 6);
  EXPECT_EQ(m.hyperparams.beta, 2.0);
  // the stored weights solve the stationarity equation on the training data
  const Graph g = load_adjacency(dir / "adjacency.csv");
  const TrainingMatrices tm{hidden_matrix(m.hidden, x), t};
  EXPECT_LT(stationarity_residual(tm, laplacian(g).matrix, m.hyperparams, m.output_weights), 1e-8);

  r = run_cli({"predict", "--model", model.string(), "--inputs", (dir / "inputs.csv").string(), "--out",
               (dir / "pred.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Matrix pred = load_signal_matrix(dir / "pred.csv");
  EXPECT_LT((pred - predict(m, x)).cwiseAbs().maxCoeff(), 1e-12);

  r = run_cli({"eval", "--model", model.string(), "--inputs", (dir / "inputs.csv").string(), "--truth",
               (dir / "clean_targets.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto pos = r.out.find("nmse_db=");
  ASSERT_NE(pos, std::string::npos);
  const double reported = std::stod(r.out.substr(pos + 8));
  EXPECT_NEAR(reported, nmse_db(pred, load_signal_matrix(dir / "clean_targets.csv")), 1e-9);

  // predictions of the truth against itself hit the floor
  r = run_cli({"eval", "--model", model.string(), "--inputs", (dir / "inputs.csv").string(), "--truth",
               (dir / "pred.csv").string()});
  EXPECT_NE(r.out.find("nmse_db=-200"), std::string::npos) << r.out;
}

TEST(CliTrain, InputAndNumericalErrors) {
  const auto dir = synth_fixture("cli_errors", 4);
  write_text(dir / "rect.csv", "0,1,1\n1,0,1\n");
  auto r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets", (dir / "targets.csv").string(),
                    "--adjacency", (dir / "rect.csv").string(), "--model-out", (dir / "m.json").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error[input]: ", 0), 0u);

  // K = 10 > N = 4 with alpha = 0
  r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets", (dir / "targets.csv").string(),
               "--adjacency", (dir / "adjacency.csv").string(), "--k", "10", "--alpha", "0", "--beta", "1",
               "--model-out", (dir / "m.json").string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.err.rfind("error[numerical]: ", 0), 0u) << r.err;

  r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets", (dir / "targets.csv").string(),
               "--adjacency", (dir / "adjacency.csv").string(), "--solver", "cg", "--model-out",
               (dir / "m.json").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(CliTrain, IdenticalFlagsGiveIdenticalFiles) {
  const auto dir = synth_fixture("cli_bytes");
  for (const char* name : {"a.json", "b.json"}) {
    const auto r = run_cli({"train", "--inputs", (dir / "inputs.csv").string(), "--targets",
                            (dir / "targets.csv").string(), "--adjacency", (dir / "adjacency.csv").string(), "--k",
                            "7", "--beta", "0.5", "--seed", "2", "--model-out", (dir / name).string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
}

TEST(CliSpectrum, UnregularizedAndEnergy) {
  const auto dir = synth_fixture("cli_spectrum");
  auto spectrum = [&](const std::string& alpha, const std::string& beta, const std::string& file) {
    return run_cli({"spectrum", "--inputs", (dir / "inputs.csv").string(), "--targets",
                    (dir / "targets.csv").string(), "--adjacency", (dir / "adjacency.csv").string(), "--k", "6",
                    "--alpha", alpha, "--beta", beta, "--seed", "4", "--out", (dir / file).string()});
  };
  auto r = spectrum("0", "0", "flat.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "flat.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "lambda,sigma2,zeta,input_energy,retained_energy");
  const Matrix flat = parse_csv_matrix(in);
  EXPECT_TRUE(flat.col(2).isOnes(0.0));

  r = spectrum("0.1", "3", "shrunk.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in2(dir / "shrunk.csv");
  std::getline(in2, header);
  const Matrix shrunk = parse_csv_matrix(in2);
  // retained energy of the report equals the energy of the fitted training output
  const HiddenLayer layer = init_hidden_layer(4, ActivationKind::Sigmoid, 6, 3);
  const TrainingMatrices tm{hidden_matrix(layer, load_signal_matrix(dir / "inputs.csv")),
                            load_signal_matrix(dir / "targets.csv")};
  const auto eig = laplacian_eigendecomposition(laplacian(load_adjacency(dir / "adjacency.csv")));
  const double fit_energy = training_fit_spectral(tm, eig, {0.1, 3.0}).squaredNorm();
  EXPECT_NEAR(shrunk.col(4).sum(), fit_energy, 1e-9 * fit_energy);
}

TEST(CliSweep, SmokeAndDeterminism) {
  const auto dir = temp_dir("cli_sweep");
  write_text(dir / "config.json", R"({
    "activation": "sigmoid", "K": [15], "N": [4, 10], "trials": 1, "seed": 8,
    "alpha_grid": [0.001, 0.1, 10], "beta_grid": [0, 1, 100],
    "data": {"type": "synthetic", "nodes": 8, "radius": 0.6, "tau": 3, "input_dim": 3, "pool_size": 40}
  })");
  auto r = run_cli({"sweep", "--config", (dir / "config.json").string(), "--out", (dir / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seed=8"), std::string::npos);
  r = run_cli({"sweep", "--config", (dir / "config.json").string(), "--out", (dir / "b").string(), "--jobs", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"results.csv", "curves.csv", "trials.csv"}) EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  const std::string results = slurp(dir / "a" / "results.csv");
  EXPECT_EQ(results.substr(0, results.find('\n')), "activation,K,N,method,mean_nmse_db,std_nmse_db,R");
  EXPECT_EQ(std::count(results.begin(), results.end(), '\n'), 5);

  write_text(dir / "bad.json", R"({"beta_grid": [1, 2]})");
  EXPECT_EQ(run_cli({"sweep", "--config", (dir / "bad.json").string(), "--out", (dir / "c").string()}).code, 2);
}

TEST(CliSweep, ManifestSource) {
  const auto dir = synth_fixture("cli_sweep_manifest", 30);
  write_text(dir / "config.json", R"({
    "K": 10, "N": [5], "trials": 2, "alpha_grid": [0.01, 1], "beta_grid": [0, 1],
    "data": {"type": "manifest", "path": "manifest.json"}
  })");
  const auto r = run_cli({"sweep", "--config", (dir / "config.json").string(), "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "curves.csv"));
}

}  // namespace
}  // namespace elmg
