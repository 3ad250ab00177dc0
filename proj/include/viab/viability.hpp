#ifndef VIAB_VIABILITY_HPP
#define VIAB_VIABILITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "viab/coefficients.hpp"
#include "viab/manifold.hpp"

// Pointwise evaluation of the three viability conditions on K and their
// aggregation over sampled (t, xbar) into a verdict:
//   (i)   2<b,m> - sum_a <<D sigma_a, sigma_a>, m> - 2 sum_e <gamma,m> w(e) = 0
//   (ii)  <sigma_a, m> = 0 for every a and normal m
//   (iii) d_K(xbar + gamma(t,xbar,e)) = 0 for every mark e

namespace viab {

struct ConditionResiduals {
  Vec point;
  double time = 0.0;
  std::vector<double> drift_residuals;                  // one per normal direction
  std::vector<std::vector<double>> tangency_residuals;  // [alpha][normal]
  std::vector<double> jump_residuals;                   // d_K per mark
};

struct CheckerTolerances {
  double drift = 1e-6;
  double tangency = 1e-6;
  double jump = 1e-8;
  bool use_analytic = true;  // analytic <D sigma, sigma> oracle when attached
  double fd_step = 1e-5;

  static CheckerTolerances analytic_profile() { return {}; }
  static CheckerTolerances fd_profile() {
    CheckerTolerances t;
    t.drift = 1e-4;
    t.tangency = 1e-4;
    t.use_analytic = false;
    return t;
  }
};

struct ViabilityReport {
  std::vector<ConditionResiduals> samples;
  double max_drift = 0.0;
  double max_tangency = 0.0;
  double max_jump = 0.0;
  // sample attaining max |drift residual|
  Vec worst_point;
  double worst_time = 0.0;
  double worst_drift = 0.0;  // signed
  bool drift_pass = false;
  bool tangency_pass = false;
  bool jump_pass = false;
  bool pass = false;
  CheckerTolerances tolerances;
  int n_times = 0;
  int n_points = 0;
};

// Residuals at one on-manifold point, using normal_basis(M, xbar).
ConditionResiduals check_point(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                               const ImplicitManifold& M, double t, const Vec& xbar,
                               const CheckerTolerances& tol = {});

// Same, against caller-supplied (not necessarily unit) normal vectors;
// residuals scale linearly with |m|.
ConditionResiduals check_point_with_normals(const CoefficientSet& coeffs,
                                            const JumpMeasure& jumps, const ImplicitManifold& M,
                                            double t, const Vec& xbar,
                                            const std::vector<Vec>& normals,
                                            const CheckerTolerances& tol = {});

// Sampled certificate over time_grid x sample_manifold(sample_count).
ViabilityReport check_manifold(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                               const ImplicitManifold& M, const Vec& time_grid, int sample_count,
                               const CheckerTolerances& tol, std::uint64_t seed,
                               int threads = 1);

// Drift residual in the sphere-specific form
//   2<b,xbar> + sum_a |sigma_a|^2 - 2 sum_e <gamma,xbar> w(e),
// valid for K = S^2 with unit outward normal xbar.
double sphere_form_drift_residual(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                                  double t, const Vec& xbar);

}  // namespace viab

#endif  // VIAB_VIABILITY_HPP
