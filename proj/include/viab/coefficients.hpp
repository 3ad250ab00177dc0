#ifndef VIAB_COEFFICIENTS_HPP
#define VIAB_COEFFICIENTS_HPP

#include <functional>
#include <vector>

#include "viab/common.hpp"

namespace viab {

using FieldFn = std::function<Vec(double t, const Vec& x)>;
using JumpFn = std::function<Vec(double t, const Vec& x, const Vec& e)>;

// Coefficient fields of dX = b dt + sum_a sigma_a dW_a + integral gamma dN~.
struct CoefficientSet {
  int dim_state = 0;  // m
  int dim_noise = 0;  // d
  FieldFn drift;
  std::vector<FieldFn> diffusion_columns;  // sigma_alpha, one per noise dim
  JumpFn jump;                             // gamma; empty when no jumps

  // Optional analytic oracle for <D sigma_a, sigma_a> per column; when absent
  // the derivative is taken by central differences along sigma_a.
  std::vector<FieldFn> sigma_self_derivative;

  bool has_analytic_derivatives() const {
    return sigma_self_derivative.size() == diffusion_columns.size() &&
           !diffusion_columns.empty();
  }
};

// One atom of a finite discrete mark measure.
struct Mark {
  Vec point;      // e in R^l
  double weight;  // n({e}) > 0
};

struct JumpMeasure {
  std::vector<Mark> marks;

  double total_mass() const {
    double s = 0.0;
    for (const Mark& m : marks) s += m.weight;
    return s;
  }
  bool empty() const { return marks.empty(); }
};

// Constants of assumption (A2) and the derived constant
// C >= 1 + 2 mu + mu^2 + integral rho^2 dn.
struct LipschitzData {
  double mu;
  double rho_sq_integral;
  double C;

  LipschitzData(double mu_, double rho_sq, double C_ = -1.0)
      : mu(mu_), rho_sq_integral(rho_sq), C(C_ < 0.0 ? bound(mu_, rho_sq) : C_) {
    if (mu < 0.0 || rho_sq_integral < 0.0)
      throw Error("LipschitzData: mu and rho^2 integral must be nonnegative");
    if (C < bound(mu, rho_sq_integral) - 1e-12)
      throw Error("LipschitzData: C below 1 + 2 mu + mu^2 + rho^2 integral");
  }

  static double bound(double mu, double rho_sq) { return 1.0 + 2.0 * mu + mu * mu + rho_sq; }
};

struct SDEProblem {
  CoefficientSet coefficients;
  JumpMeasure jumps;
  double t0 = 0.0;
  Vec x0;
  double horizon = 1.0;  // T

  void validate() const {
    if (static_cast<int>(x0.size()) != coefficients.dim_state)
      throw Error("SDEProblem: x0 dimension mismatch");
    if (!std::isfinite(horizon) || horizon < t0)
      throw Error("SDEProblem: horizon must be finite and >= t0");
  }
};

// <D sigma_a, sigma_a>(t, x): componentwise gradient of sigma_a contracted
// with sigma_a itself. Uses the analytic oracle if attached (and use_analytic),
// else a central difference along the unit direction of sigma_a:
//   [sigma(t, x + h u) - sigma(t, x - h u)] / (2h) * |sigma|.
Vec directional_derivative_sigma(const CoefficientSet& coeffs, int alpha, double t, const Vec& x,
                                 bool use_analytic = true, double fd_step = 1e-5);

// Stratonovich-form drift b - 1/2 sum_a <D sigma_a, sigma_a>.
Vec ito_to_stratonovich_drift(const CoefficientSet& coeffs, double t, const Vec& x,
                              bool use_analytic = true, double fd_step = 1e-5);

// Empirical check of the (A2) difference quotients on sampled point pairs.
// Returns the largest ratio (|b(x)-b(x')| + |sigma(x)-sigma(x')|) / |x-x'|.
double max_lipschitz_quotient(const CoefficientSet& coeffs, double t, double box_radius,
                              int n_pairs, std::uint64_t seed);

}  // namespace viab

#endif  // VIAB_COEFFICIENTS_HPP
