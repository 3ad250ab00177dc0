#ifndef VIAB_MONTECARLO_HPP
#define VIAB_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "viab/manifold.hpp"
#include "viab/sde.hpp"

// Path-ensemble statistics: the empirical viability statistic
// sup_s d_K(X_s), strong-error convergence against the closed forms, and the
// checker/simulator coherence verdict.

namespace viab {

struct OracleSpec {
  OracleId id;
  double beta;
};

struct EnsembleStats {
  int n_paths = 0;
  std::vector<double> sup_dist;       // per path, over grid nodes and post-jump points
  std::vector<double> terminal_dist;  // per path
  std::vector<double> strong_errors;  // per path max |X_sim - X_oracle|; empty without oracle
  double mean_sup_dist = 0.0;
  double max_sup_dist = 0.0;
  double q50_sup_dist = 0.0;
  double q90_sup_dist = 0.0;
  double mean_terminal_dist = 0.0;
  double max_terminal_dist = 0.0;
  double mean_strong_error = 0.0;
  int error_count = 0;  // paths that raised a simulation error
  std::uint64_t seed = 0;
};

EnsembleStats run_ensemble(const SDEProblem& problem, const ImplicitManifold& M, int n_paths,
                           int n_steps, std::uint64_t root_seed,
                           const std::optional<OracleSpec>& oracle = std::nullopt,
                           int threads = 1);

enum class ConvergenceCase { Ex33, Ex34, Ex35, DriftLinear };

struct ConvergenceRow {
  double h;
  double mean_error;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;
  bool exact_match = false;  // some rung had error 0; slope not meaningful
};

// Least-squares slope of log(mean strong error) against log h over a ladder
// of step sizes, with oracle paths sharing the simulated noise.
ConvergenceReport convergence_rate(ConvergenceCase which, double beta, double lambda,
                                   const std::vector<double>& step_ladder, int n_paths,
                                   std::uint64_t seed);

struct CoherenceVerdict {
  bool checker_pass = false;
  double max_drift_residual = 0.0;
  double mean_sup_dist = 0.0;
  double mean_terminal_dist = 0.0;
  bool coherent = false;
};

struct CoherenceTolerances {
  double viab_stat_tol = 0.05;  // mean sup d_K bound for PASS scenarios (h = 1e-3)
  double fail_floor = 0.3;      // mean terminal d_K floor for FAIL scenarios
};

// Desk-scale embodiment of the equivalence between the pointwise conditions
// and pathwise viability, on a builtin scenario.
CoherenceVerdict coherence_test(ConvergenceCase which, double beta, double lambda,
                                const CoherenceTolerances& tol, std::uint64_t seed);

}  // namespace viab

#endif  // VIAB_MONTECARLO_HPP
