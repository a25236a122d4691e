#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <cstdlib>
#include <functional>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mfgpi/commands.hpp"
#include "mfgpi/config.hpp"
#include "mfgpi/output.hpp"

using namespace mfg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mfgpi_cli_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

std::string config_error_key(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("config text parsing") {
  const RunConfig c = parse_config_text(
      "# comment\nscenario = example2\nalgorithm=pi2\n  beta = 1.25 # trailing\nI = 64\nR = inf\n");
  CHECK(c.scenario == "example2");
  CHECK(c.algorithm == "pi2");
  CHECK(*c.beta == 1.25);
  CHECK(*c.nodes == 64);
  CHECK(std::isinf(c.bound));

  CHECK(config_error_key([] { parse_config_text("I = 4\nI = 5\n"); }) == "I");
  CHECK(config_error_key([] { parse_config_text("colour = blue\n"); }) == "colour");
  CHECK(config_error_key([] { parse_config_text("tol = abc\n"); }) == "tol");
  CHECK(config_error_key([] { parse_config_text("N = 2.5\n"); }) == "N");
  CHECK(config_error_key([] { parse_config_text("algorithm = newton\n"); }) == "algorithm");
  CHECK(config_error_key([] { parse_config_text("just text\n"); }) == "");
}

TEST_CASE("validation names the offending key") {
  auto key_for = [](const std::string& assignment) {
    return config_error_key([&] {
      RunConfig c;
      apply_overrides(c, {assignment});
      to_solver_config(c);
    });
  };
  CHECK(key_for("I=0") == "I");
  CHECK(key_for("N=0") == "N");
  CHECK(key_for("T=-1") == "T");
  CHECK(key_for("beta=0") == "beta");
  CHECK(key_for("zeta=-0.1") == "zeta");
  CHECK(key_for("epsilon=0") == "epsilon");
  CHECK(key_for("R=0") == "R");
  CHECK(key_for("tol=0") == "tol");
  CHECK(key_for("max_iters=0") == "max_iters");
  CHECK(key_for("newton_max_iters=0") == "newton_max_iters");
  CHECK(key_for("zeta=0") == "<no error>");
  CHECK(config_error_key([] {
          RunConfig c;
          apply_overrides(c, {"no-equals"});
        }) == "");
}

TEST_CASE("overrides apply on top of defaults and the echo is complete") {
  RunConfig c;
  apply_overrides(c, {"scenario=example3", "I=20", "N=10"});
  const SolverConfig s = to_solver_config(c);
  CHECK(s.scenario.nodes == 20);
  CHECK(s.scenario.steps == 10);
  CHECK(s.max_outer_iters == kDefaultMaxIters);
  const nlohmann::json j = resolved_config_json(c);
  for (const char* key : {"scenario", "algorithm", "beta", "zeta", "T", "I", "N", "epsilon", "R", "tol",
                          "max_iters", "linear_solver", "newton_tol", "newton_max_iters", "blowup",
                          "pi1_source"})
    CHECK(j.contains(key));
  CHECK(j["R"] == "inf");
}

TEST_CASE("format_real") {
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(0.1 + 0.2) == "0.30000000000000004");
  CHECK(std::strtod(format_real(1.0 / 3.0).c_str(), nullptr) == 1.0 / 3.0);
  CHECK(format_real(NAN) == "nan");
  CHECK(format_real(-INFINITY) == "-inf");
}

TEST_CASE("run writes outputs and its manifest reproduces them bitwise") {
  TempDir dir;
  CommandOptions o;
  o.sets = {"I=24", "N=24", "algorithm=pi2"};
  o.output_dir = dir / "first";
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == kExitConverged);

  const std::string first = dir / "first";
  CHECK(first_line(first + "/density.csv") == "t,x1,m");
  CHECK(first_line(first + "/value.csv") == "t,x1,u");
  CHECK(first_line(first + "/policy.csv") == "t,x1,q_left_1,q_right_1");
  CHECK(first_line(first + "/history.csv") == "iteration,d_density,res_hjb,res_fp,gap_u,gap_m,gap_q");

  const nlohmann::json manifest = nlohmann::json::parse(slurp(first + "/manifest.json"));
  CHECK(manifest["verdict"] == "converged");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["config"]["I"] == 24);
  CHECK(manifest["iterations"].get<int>() > 0);

  CommandOptions again;
  again.config_path = first + "/manifest.json";
  again.output_dir = dir / "second";
  REQUIRE(cmd_run(again, out, err) == kExitConverged);
  for (const char* f : {"density.csv", "value.csv", "policy.csv", "history.csv"}) {
    CAPTURE(f);
    CHECK(slurp(first + "/" + f) == slurp(dir / ("second/" + std::string(f))));
  }
}

TEST_CASE("2D run writes both coordinates") {
  TempDir dir;
  CommandOptions o;
  o.sets = {"scenario=example3", "I=8", "N=8"};
  o.output_dir = dir.path.string();
  std::ostringstream out, err;
  REQUIRE(cmd_run(o, out, err) == kExitConverged);
  CHECK(first_line(dir / "density.csv") == "t,x1,x2,m");
  CHECK(first_line(dir / "policy.csv") == "t,x1,x2,q_left_1,q_right_1,q_left_2,q_right_2");
}

TEST_CASE("run exit codes") {
  TempDir dir;
  std::ostringstream out, err;
  CommandOptions o;
  o.output_dir = dir.path.string();

  o.sets = {"I=0"};
  CHECK(cmd_run(o, out, err) == kExitUsage);
  CHECK(err.str().find("'I'") != std::string::npos);

  o.sets = {"bogus=1"};
  CHECK(cmd_run(o, out, err) == kExitUsage);

  o.sets = {};
  o.config_path = dir / "missing.cfg";
  CHECK(cmd_run(o, out, err) == kExitUsage);
  o.config_path.reset();

  o.sets = {"I=20", "N=20", "blowup=1e-3"};
  CHECK(cmd_run(o, out, err) == kExitDiverged);
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["verdict"] == "diverged");
  CHECK(manifest["exit_code"] == 2);
  CHECK(fs::exists(dir / "history.csv"));

  o.sets = {"I=20", "N=20", "max_iters=2"};
  CHECK(cmd_run(o, out, err) == kExitDiverged);
}

TEST_CASE("compare") {
  TempDir dir;
  std::ostringstream out, err;
  CommandOptions o;
  o.output_dir = dir.path.string();
  o.sets = {"I=20", "N=20"};
  CHECK(cmd_compare(o, {"pi1"}, out, err) == kExitUsage);
  CHECK(cmd_compare(o, {"pi1", "pi1"}, out, err) == kExitUsage);
  CHECK(cmd_compare(o, {"pi1", "nope"}, out, err) == kExitUsage);

  REQUIRE(cmd_compare(o, {"pi2", "fixed_point"}, out, err) == kExitConverged);
  const std::string header = first_line(dir / "compare_history.csv");
  CHECK(header.find("iteration") == 0);
  CHECK(header.find("fixed_point_d_density") != std::string::npos);
  CHECK(header.find("pi2_gap_m") != std::string::npos);
  CHECK(fs::exists(dir / "compare_timing.csv"));
  const nlohmann::json manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["exit_code"] == 0);
}

TEST_CASE("sweep writes the grid") {
  TempDir dir;
  std::ostringstream out, err;
  CommandOptions o;
  o.output_dir = dir.path.string();
  o.sets = {"I=20", "max_iters=80"};
  SweepOptions sw;
  sw.betas = {1.5};
  sw.zetas = {0.2};
  sw.ladder = {0.25, 0.5};
  REQUIRE(cmd_sweep(o, sw, out, err) == kExitConverged);
  std::ifstream grid(dir / "max_t_grid.csv");
  std::string header, row;
  std::getline(grid, header);
  std::getline(grid, row);
  CHECK(header == "zeta\\beta,1.5");
  CHECK(row == "0.2,0.5");
  CHECK(first_line(dir / "sweep_cells.csv") == "beta,zeta,T,converged,iterations,note");
  CHECK(out.str().find(">=") != std::string::npos);
}
