#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "viab/commands.hpp"
#include "viab/scenario.hpp"
#include "viab/viability.hpp"

using namespace viab;
namespace fs = std::filesystem;

namespace {

std::string scenario_dir() { return SVIAB_SCENARIO_DIR; }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SVIAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("sviab_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("builtin scenario file loads") {
  Scenario s = load_scenario(scenario_dir() + "/ex33.scenario");
  CHECK(s.name == "ex33");
  CHECK(s.builtin.has_value());
  CHECK(s.beta == doctest::Approx(0.7));
  CHECK(s.seed == 42);
  auto rt = build_runtime(s);
  CHECK(rt.C == 9.0);
  CHECK(rt.oracle.has_value());
  CHECK(rt.problem.x0.size() == 3);
}

TEST_CASE("expression scenario file loads and estimates nothing when mu is given") {
  Scenario s = load_scenario(scenario_dir() + "/ex33_dsl.scenario");
  CHECK(!s.builtin.has_value());
  auto rt = build_runtime(s);
  CHECK(!rt.mu_estimated);
  CHECK(rt.mu == 2.0);
  CHECK(rt.coefficients.dim_noise == 1);
  Vec v = rt.coefficients.drift(0.0, {1.0, 2.0, 4.0});
  CHECK(v == Vec{0.0, -1.0, -2.0});
}

TEST_CASE("mu is estimated (and flagged) when absent") {
  std::string text = R"([scenario]
name = est
manifold = sphere
m = 3
d = 1

[coefficients]
drift = "0", "-0.5*x2", "-0.5*x3"
sigma1 = "0", "-x3", "x2"

[numerics]
seed = 3
)";
  Scenario s = parse_scenario(text, "<test>");
  auto rt = build_runtime(s);
  CHECK(rt.mu_estimated);
  // true Lipschitz quotient is 1.5; the 1.25 safety factor lands near 1.9
  CHECK(rt.mu >= 1.4);
  CHECK(rt.mu <= 2.5);
}

TEST_CASE("unknown keys, sections and malformed lines carry line numbers") {
  auto expect_line = [](const std::string& text, int line) {
    try {
      parse_scenario(text, "<test>");
      FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
      CHECK(e.line_number == line);
    }
  };
  expect_line("[scenario]\nnam = x\n", 2);
  expect_line("[scenario]\nname = x\n[oops]\n", 3);
  expect_line("[scenario]\nname\n", 2);
  expect_line("key = 1\n", 1);
  expect_line("[numerics]\nn_steps = soon\n", 2);
}

TEST_CASE("structural validation") {
  CHECK_THROWS_AS(parse_scenario("[scenario]\nmanifold = moebius\n", "<t>"), ScenarioError);
  // missing sigma column count
  CHECK_THROWS_AS(parse_scenario(R"([scenario]
m = 3
d = 2
[coefficients]
drift = "0", "0", "0"
sigma1 = "0", "0", "0"
)",
                                 "<t>"),
                  ScenarioError);
  // rho without marks
  CHECK_THROWS_AS(parse_scenario(R"([scenario]
m = 3
d = 1
[coefficients]
drift = "0", "0", "0"
sigma1 = "0", "0", "0"
[jumps]
rho = "1"
)",
                                 "<t>"),
                  ScenarioError);
  // jump coefficient without marks
  CHECK_THROWS_AS(parse_scenario(R"([scenario]
m = 3
d = 1
[coefficients]
drift = "0", "0", "0"
sigma1 = "0", "0", "0"
jump = "0", "0", "0"
)",
                                 "<t>"),
                  ScenarioError);
  // builtin plus expressions
  CHECK_THROWS_AS(parse_scenario(R"([scenario]
m = 3
d = 1
[coefficients]
builtin = ex33
drift = "0", "0", "0"
)",
                                 "<t>"),
                  ScenarioError);
  // builtin plus a jump measure
  CHECK_THROWS_AS(parse_scenario(R"([coefficients]
builtin = ex35
lambda = 1
[jumps]
mark = 1.0, 1.0
)",
                                 "<t>"),
                  ScenarioError);
}

TEST_CASE("expression-defined ex33 reproduces builtin residuals bitwise") {
  Scenario dsl = load_scenario(scenario_dir() + "/ex33_dsl.scenario");
  auto rt = build_runtime(dsl);
  Scenario bi = load_scenario(scenario_dir() + "/ex33.scenario");
  auto rtb = build_runtime(bi);

  auto M = make_sphere();
  auto pts = sample_manifold(M, 50, 777);
  CheckerTolerances fd = CheckerTolerances::fd_profile();  // same code path for both
  for (const Vec& x : pts) {
    auto a = check_point(rt.coefficients, rt.jumps, M, 0.37, x, fd);
    auto b = check_point(rtb.coefficients, rtb.jumps, M, 0.37, x, fd);
    CHECK(a.drift_residuals[0] == b.drift_residuals[0]);
    CHECK(a.tangency_residuals[0][0] == b.tangency_residuals[0][0]);
  }
}

TEST_CASE("circle scenario through the expression route") {
  // 2-D analog of the viable rotation: b = -x/2 offsets the Ito correction
  // of sigma = (-x2, x1).
  std::string text = R"([scenario]
name = circle-rotation
manifold = circle
m = 2
d = 1

[coefficients]
drift = "-0.5*x1", "-0.5*x2"
sigma1 = "-x2", "x1"

[lipschitz]
mu = 2.0

[numerics]
seed = 12
)";
  auto rt = build_runtime(parse_scenario(text, "<test>"));
  CHECK(rt.manifold.ambient_dim == 2);
  CHECK(norm(rt.problem.x0) == doctest::Approx(1.0).epsilon(1e-12));
  auto rep = check_manifold(rt.coefficients, rt.jumps, rt.manifold, {0.0, 1.0}, 200,
                            CheckerTolerances::fd_profile(), 12);
  CHECK(rep.pass);
  CHECK(rep.max_drift <= 1e-9);
}

TEST_CASE("cli: check verdict exit codes") {
  auto out = fresh_dir("check");
  CHECK(run_cli("check --scenario " + scenario_dir() + "/ex33.scenario --out " +
                (out / "a").string()) == 0);
  CHECK(run_cli("check --scenario " + scenario_dir() + "/ex34.scenario --out " +
                (out / "b").string()) == 1);
  CHECK(run_cli("check --scenario /nonexistent.scenario --out " + (out / "c").string()) == 2);

  // malformed scenario: exit 2
  fs::path bad = out / "bad.scenario";
  std::ofstream(bad) << "[scenario]\nnam = oops\n";
  CHECK(run_cli("check --scenario " + bad.string() + " --out " + (out / "d").string()) == 2);
}

TEST_CASE("cli: fd tolerance profile also passes ex33") {
  auto out = fresh_dir("fd");
  CHECK(run_cli("check --tolerance-profile fd --scenario " + scenario_dir() +
                "/ex33_dsl.scenario --out " + out.string()) == 0);
}

TEST_CASE("cli: supersolution verdicts") {
  auto out = fresh_dir("super");
  CHECK(run_cli("supersolution --scenario " + scenario_dir() + "/ex33_dsl.scenario --out " +
                (out / "pass").string()) == 0);
  CHECK(run_cli("supersolution --scenario " + scenario_dir() + "/ex34.scenario --out " +
                (out / "fail").string()) == 1);
}

TEST_CASE("cli: convergence ladder validation") {
  auto out = fresh_dir("conv");
  CHECK(run_cli("convergence --scenario " + scenario_dir() +
                "/repro.scenario --ladder 2^-4..2^-7 --out " + (out / "ok").string()) == 0);
  CHECK(run_cli("convergence --scenario " + scenario_dir() +
                "/repro.scenario --ladder 0.25 --out " + (out / "short").string()) == 2);
}

TEST_CASE("cli: reruns with the same seed are byte identical") {
  auto out = fresh_dir("repro");
  std::string scen = scenario_dir() + "/repro.scenario";
  REQUIRE(run_cli("simulate --scenario " + scen + " --out " + (out / "r1").string()) == 0);
  REQUIRE(run_cli("simulate --scenario " + scen + " --out " + (out / "r2").string()) == 0);
  for (const char* f : {"paths.csv", "ensemble.csv", "dist_bands.csv", "radius.csv", "jumps.csv"})
    CHECK(slurp(out / "r1" / f) == slurp(out / "r2" / f));

  // a different seed changes the body
  REQUIRE(run_cli("simulate --scenario " + scen + " --seed 8 --out " + (out / "r3").string()) ==
          0);
  CHECK(slurp(out / "r1" / "paths.csv") != slurp(out / "r3" / "paths.csv"));
}

TEST_CASE("cli: torus scenario via the general geometry path") {
  auto out = fresh_dir("torus");
  int rc = run_cli("check --tolerance-profile fd --scenario " + scenario_dir() +
                   "/torus_drift.scenario --out " + out.string());
  CHECK(rc == 1);  // vertical drift is not tangent to the torus
}

TEST_CASE("cli: report files carry the hash header and expected columns") {
  auto out = fresh_dir("columns");
  REQUIRE(run_cli("check --scenario " + scenario_dir() + "/ex33_dsl.scenario --out " +
                  out.string()) == 0);
  std::istringstream in(slurp(out / "check_report.csv"));
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("# scenario=", 0) == 0);
  CHECK(line.find("seed=42") != std::string::npos);
  REQUIRE(std::getline(in, line));
  CHECK(line == "t,x1,x2,x3,kind,component,value");
  long rows = 0;
  while (std::getline(in, line)) ++rows;
  // 10 times x 200 points x (1 drift + 1 tangency) rows
  CHECK(rows == 10 * 200 * 2);
}

TEST_CASE("cli: ex34 radius band decays like exp(-(s-t))") {
  auto out = fresh_dir("radius");
  REQUIRE(run_cli("simulate --scenario " + scenario_dir() + "/ex34.scenario --out " +
                  out.string()) == 0);
  std::istringstream in(slurp(out / "radius.csv"));
  std::string line;
  std::getline(in, line);  // hash
  std::getline(in, line);  // header
  long checked = 0;
  while (std::getline(in, line)) {
    double t, q10, q50, q90;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &t, &q10, &q50, &q90) == 4);
    double expected = std::exp(-t);  // beta = pi/2
    CHECK(std::abs(q50 - expected) <= 0.05);
    CHECK(q10 <= q50);
    CHECK(q50 <= q90);
    ++checked;
  }
  CHECK(checked == 1001);
}

TEST_CASE("cli: jump epochs are visible in the jump log") {
  auto out = fresh_dir("jumps");
  REQUIRE(run_cli("simulate --scenario " + scenario_dir() + "/repro.scenario --out " +
                  out.string()) == 0);
  std::istringstream in(slurp(out / "jumps.csv"));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  long rows = 0;
  double t_min = 1e9, t_max = -1e9;
  while (std::getline(in, line)) {
    int path, mark;
    double t, pre, post;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%d,%lf,%lf", &path, &t, &mark, &pre, &post) == 5);
    t_min = std::min(t_min, t);
    t_max = std::max(t_max, t);
    ++rows;
  }
  // lambda = 2, 50 paths over [0,1]: about 100 jumps
  CHECK(rows >= 60);
  CHECK(rows <= 160);
  CHECK(t_min > 0.0);
  CHECK(t_max <= 1.0);
}
