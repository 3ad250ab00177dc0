#ifndef VIAB_SCENARIO_HPP
#define VIAB_SCENARIO_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viab/builtin.hpp"
#include "viab/coefficients.hpp"
#include "viab/manifold.hpp"

// Line-oriented scenario files: `[section]` headers and `key = value` lines.
// Values are numbers, comma-separated lists, or double-quoted expressions in
// the coefficient language. Unknown sections and keys are errors. The exact
// grammar is documented in the README.

namespace viab {

class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& msg, int line = 0) : Error(msg), line_number(line) {}
  int line_number;
};

struct Scenario {
  std::string name;
  std::string manifold_kind = "sphere";  // sphere | circle | torus | implicit
  int m = 0;
  int d = 0;
  int l = 0;

  std::optional<BuiltinId> builtin;
  double beta = 0.0;
  double lambda = 0.0;

  std::vector<std::string> drift_exprs;
  std::vector<std::vector<std::string>> sigma_exprs;
  std::vector<std::string> jump_exprs;
  std::map<std::string, double> params;

  std::vector<Mark> marks;
  std::string rho_expr;

  std::optional<double> mu;
  std::optional<double> lipschitz_C;

  std::vector<std::string> constraint_exprs;
  std::optional<double> tube_radius;
  double sample_scale = 1.0;

  double t0 = 0.0;
  double horizon = 1.0;
  int n_steps = 1000;
  int n_paths = 500;
  int sample_count = 500;
  int time_samples = 20;
  std::uint64_t seed = 1;

  std::optional<double> tol_drift;
  std::optional<double> tol_tangency;
  std::optional<double> tol_jump;
  std::optional<double> tol_slack;

  std::uint64_t content_hash = 0;
  std::string source_path;
};

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text, const std::string& path_for_errors);

// Everything a command needs, assembled from a validated scenario.
struct ScenarioRuntime {
  CoefficientSet coefficients;
  JumpMeasure jumps;
  SDEProblem problem;
  ImplicitManifold manifold;
  std::optional<OracleId> oracle;
  // Lipschitz constants; mu_estimated marks a difference-quotient estimate
  // (printed in reports, never silent).
  double mu = 0.0;
  double rho_sq_integral = 0.0;
  double C = 0.0;
  bool mu_estimated = false;
};

ScenarioRuntime build_runtime(const Scenario& s);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace viab

#endif  // VIAB_SCENARIO_HPP
