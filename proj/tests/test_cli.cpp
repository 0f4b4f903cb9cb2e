#include <gtest/gtest.h>

#ifdef FRONTLAB_HAVE_CLI

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("frontlab_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const json& config, const std::string& name = "config.json") {
    const auto path = dir_ / name;
    std::ofstream(path) << config.dump(2);
    return path;
  }

  struct Result {
    int code = 0;
    std::string out, err;
  };

  Result run(const std::string& command, const json& config, const std::string& prefix = "run/out",
             unsigned jobs = 1) {
    frontlab::cli::RunOptions o;
    o.command = command;
    o.config = write_config(config);
    o.out_prefix = (dir_ / prefix).string();
    o.jobs = jobs;
    std::ostringstream out, err;
    Result r;
    r.code = frontlab::cli::run(o, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::size_t file_count() const {
    std::size_t n = 0;
    for (const auto& e : fs::recursive_directory_iterator(dir_)) n += e.is_regular_file();
    return n;
  }

  fs::path dir_;
};

json homogeneous_params() {
  return {{"sigma", 1.0}, {"r_u", 1.0},  {"r_v", 1.0}, {"kappa_u", 1.0},
          {"kappa_v", 1.0}, {"mu_u", 0.5}, {"mu_v", 0.5}};
}

json cosine_set(double sigma_mean = 1.0) {
  return {{"period", 1.0},
          {"sigma", sigma_mean},
          {"r_u", {{"kind", "cosine"}, {"mean", 1.0}, {"amplitude", 0.5}, {"phase", 0.1}}},
          {"r_v", {{"kind", "cosine"}, {"mean", 0.5}, {"amplitude", 0.3}}},
          {"kappa_u", 1.0},
          {"kappa_v", 1.0},
          {"mu_u", 0.5},
          {"mu_v", 0.5}};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST_F(CliTest, EigenHomogeneousCurve) {
  const auto r = run("eigen", {{"hom_params", homogeneous_params()}});
  ASSERT_EQ(r.code, frontlab::cli::exit_ok) << r.err;
  const std::string text = read("run/out_kcurve.csv");
  EXPECT_EQ(text.rfind("# config_hash=", 0), 0u);
  const auto rows = csv_rows(text);
  ASSERT_EQ(rows.size(), 62u);
  EXPECT_EQ(rows[0][0], "lambda");
  EXPECT_EQ(rows[0][1], "k");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double lambda = std::stod(rows[i][0]), k = std::stod(rows[i][1]);
    EXPECT_NEAR(k, lambda * lambda + 1.0, 1e-7) << lambda;
  }
  EXPECT_NE(r.out.find("out_kcurve.csv"), std::string::npos);
}

TEST_F(CliTest, InvalidCoefficientsExitTwoWithoutFiles) {
  auto set = cosine_set(-1.0);
  const auto r = run("eigen", {{"coefficients", set}});
  EXPECT_EQ(r.code, frontlab::cli::exit_config);
  EXPECT_EQ(file_count(), 1u);  // only the config
  const auto err = json::parse(r.err);
  EXPECT_EQ(err["error"]["kind"], "validation");
  EXPECT_FALSE(err["error"]["message"].get<std::string>().empty());
}

TEST_F(CliTest, UnknownKeysAreRejected) {
  EXPECT_EQ(run("eigen", {{"hom_params", homogeneous_params()}, {"grdi", json::object()}}).code,
            frontlab::cli::exit_config);
  EXPECT_EQ(run("eigen", {{"hom_params", homogeneous_params()}, {"grid", {{"n_cell", 64}}}}).code,
            frontlab::cli::exit_config);
  auto p = homogeneous_params();
  p["muu"] = 0.5;
  EXPECT_EQ(run("ode", {{"hom_params", p}}).code, frontlab::cli::exit_config);
  EXPECT_EQ(run("ode", {{"command", "speed"}, {"hom_params", homogeneous_params()}}).code,
            frontlab::cli::exit_config);
  EXPECT_EQ(file_count(), 1u);
}

TEST_F(CliTest, MalformedJsonAndMissingFile) {
  const auto path = dir_ / "broken.json";
  std::ofstream(path) << "{ not json";
  frontlab::cli::RunOptions o;
  o.command = "eigen";
  o.config = path;
  std::ostringstream out, err;
  EXPECT_EQ(frontlab::cli::run(o, out, err), frontlab::cli::exit_config);
  o.config = dir_ / "missing.json";
  EXPECT_EQ(frontlab::cli::run(o, out, err), frontlab::cli::exit_config);
}

TEST_F(CliTest, NumericalPreconditionExitsThree) {
  auto p = homogeneous_params();
  p["r_u"] = -1.0;
  p["r_v"] = -1.0;
  const auto r = run("speed", {{"hom_params", p}});
  EXPECT_EQ(r.code, frontlab::cli::exit_numerical);
  EXPECT_EQ(json::parse(r.err)["error"]["kind"], "precondition");
  EXPECT_EQ(file_count(), 1u);
}

TEST_F(CliTest, DeterministicOutputs) {
  const json config = {{"coefficients", cosine_set()},
                       {"grid", {{"n_cells", 64}}},
                       {"eigen", {{"lambda_min", -1.0}, {"lambda_max", 1.0}, {"profiles", {0.5}}}}};
  ASSERT_EQ(run("eigen", config, "a/out").code, 0);
  ASSERT_EQ(run("eigen", config, "b/out").code, 0);
  for (const auto* suffix : {"_kcurve.csv", "_profile_0.csv"}) {
    const auto a = read(std::string("a/out") + suffix);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, read(std::string("b/out") + suffix));
    EXPECT_EQ(a.substr(0, a.find('\n')), "# config_hash=" + frontlab::cli::config_hash(config));
  }
}

TEST_F(CliTest, JsonReportsCarryTheHash) {
  const json config = {{"hom_params", homogeneous_params()}, {"ode", {{"T", 50.0}}}};
  ASSERT_EQ(run("ode", config).code, 0);
  const auto j = json::parse(read("run/out_ode.json"));
  EXPECT_EQ(j["config_hash"], frontlab::cli::config_hash(config));
  EXPECT_NEAR(j["equilibrium"]["u"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["final"]["u"].get<double>(), 0.5, 1e-6);
  EXPECT_FALSE(j["convergence_time"].is_null());
  EXPECT_LT(j["convergence_time"].get<double>(), 50.0);
  const auto trajectory = csv_rows(read("run/out_trajectory.csv"));
  EXPECT_EQ(trajectory[0], (std::vector<std::string>{"t", "u", "v", "lyapunov"}));
}

TEST_F(CliTest, SpeedAndSingleElementSweepAgree) {
  const json base = {{"coefficients", cosine_set()}, {"grid", {{"n_cells", 64}}}};
  ASSERT_EQ(run("speed", base).code, 0);
  const auto report = json::parse(read("run/out_speed.json"));
  json sweep = base;
  sweep["sweep"] = {{"eps", {1.0}}};
  ASSERT_EQ(run("sweep", sweep, "s/out").code, 0);
  const auto rows = csv_rows(read("s/out_sweep.csv"));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(std::stod(rows[1][1]), report["c_right"].get<double>());
  EXPECT_EQ(std::stod(rows[1][2]), report["c_left"].get<double>());
  EXPECT_TRUE(rows[1][7].empty());
}

TEST_F(CliTest, SweepRowsInInputOrderWithConstantTarget) {
  const json config = {{"coefficients", cosine_set()},
                       {"grid", {{"n_cells", 64}}},
                       {"sweep", {{"eps", {0.5, 1.0, 0.25}}}}};
  ASSERT_EQ(run("sweep", config, "p/out", 3).code, 0);
  ASSERT_EQ(run("sweep", config, "q/out", 1).code, 0);
  EXPECT_EQ(read("p/out_sweep.csv"), read("q/out_sweep.csv"));
  const auto rows = csv_rows(read("p/out_sweep.csv"));
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "eps");
  EXPECT_EQ(rows[1][0], "0.5");
  EXPECT_EQ(rows[2][0], "1");
  EXPECT_EQ(rows[3][0], "0.25");
  EXPECT_EQ(rows[1][3], rows[2][3]);
  EXPECT_EQ(rows[2][3], rows[3][3]);
}

TEST_F(CliTest, SweepRecordsRowFailures) {
  const json config = {{"coefficients", cosine_set()},
                       {"grid", {{"n_cells", 64}}},
                       {"sweep", {{"field", "sigma"}, {"values", {1.0, -2.0}}}}};
  ASSERT_EQ(run("sweep", config).code, 0);
  const auto rows = csv_rows(read("run/out_sweep.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "value");
  EXPECT_TRUE(rows[1][7].empty());
  EXPECT_NE(rows[2][7].find("validation"), std::string::npos);
  EXPECT_EQ(rows[2][1], "nan");
}

TEST_F(CliTest, HomogenizeAndStationary) {
  const json config = {{"coefficients", cosine_set()}};
  ASSERT_EQ(run("homogenize", config).code, 0);
  const auto h = json::parse(read("run/out_homogenized.json"));
  EXPECT_EQ(h["lambda_A_sign"], "positive");
  EXPECT_GT(h["speed"].get<double>(), 0.0);
  json st = config;
  st["stationary"] = {{"n_points", 64}};
  ASSERT_EQ(run("stationary", st).code, 0);
  EXPECT_EQ(csv_rows(read("run/out_stationary.csv")).size(), 65u);
}

TEST_F(CliTest, SimulateReport) {
  const json config = {{"hom_params", homogeneous_params()},
                       {"domain", {{"x_min", -20.0}, {"x_max", 40.0}, {"n_points", 512}}},
                       {"initial", {{"kind", "right_front_like"}, {"left", -5.0}, {"right", 0.0}}},
                       {"solver", {{"T", 10.0}, {"dt", 0.05}, {"record_every", 0.25}, {"snapshot_every", 5.0}}}};
  const auto r = run("simulate", config);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(read("run/out_report.json"));
  EXPECT_EQ(j["right"]["status"], "ok");
  EXPECT_NEAR(j["right"]["speed"].get<double>(), 2.0, 0.2);
  EXPECT_LE(j["sup_u_plus_v_max"].get<double>(), j["bound"].get<double>() + 1e-8);
  EXPECT_EQ(csv_rows(read("run/out_front.csv"))[0], (std::vector<std::string>{"t", "x_right", "x_left"}));
  const auto snapshots = read("run/out_snapshots.csv");
  EXPECT_NE(snapshots.find("\nt=5\n"), std::string::npos);
  EXPECT_NE(snapshots.find("\nt=10\n"), std::string::npos);
}

TEST_F(CliTest, ToolBinaryExitCodes) {
  const std::string tool = FRONTLAB_TOOL_PATH;
  const auto good = write_config({{"hom_params", homogeneous_params()}}, "good.json");
  const auto bad = write_config({{"hom_params", homogeneous_params()}, {"typo", 1}}, "bad.json");
  auto p = homogeneous_params();
  p["r_u"] = p["r_v"] = -1.0;
  const auto dead = write_config({{"hom_params", p}}, "dead.json");
  const std::string out = (dir_ / "bin/out").string();
  auto status = [&](const std::string& args) {
    const int raw = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("homogenize --config " + good.string() + " --out " + out), 0);
  EXPECT_TRUE(fs::exists(dir_ / "bin/out_homogenized.json"));
  EXPECT_EQ(status("homogenize --config " + bad.string() + " --out " + out), 2);
  EXPECT_EQ(status("speed --config " + dead.string() + " --out " + out), 3);
  EXPECT_EQ(status("speed --out " + out), 2);
  EXPECT_EQ(status("nonsense"), 2);
  EXPECT_EQ(status("--help"), 0);
}

}  // namespace

#endif
