#include "viab/coefficients.hpp"

#include <cmath>

#include "viab/rng.hpp"

namespace viab {

Vec directional_derivative_sigma(const CoefficientSet& coeffs, int alpha, double t, const Vec& x,
                                 bool use_analytic, double fd_step) {
  if (use_analytic && coeffs.has_analytic_derivatives())
    return coeffs.sigma_self_derivative[alpha](t, x);

  Vec sigma = coeffs.diffusion_columns[alpha](t, x);
  if (!all_finite(sigma)) throw DomainError("sigma evaluated to a non-finite vector");
  double len = norm(sigma);
  if (len == 0.0) return Vec(x.size(), 0.0);  // derivative along the zero field

  Vec unit = (1.0 / len) * sigma;
  Vec xp = x, xm = x;
  axpy(fd_step, unit, xp);
  axpy(-fd_step, unit, xm);
  Vec sp = coeffs.diffusion_columns[alpha](t, xp);
  Vec sm = coeffs.diffusion_columns[alpha](t, xm);
  if (!all_finite(sp) || !all_finite(sm))
    throw DomainError("sigma finite-difference stencil evaluated non-finite");
  Vec out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = (sp[i] - sm[i]) / (2.0 * fd_step) * len;
  return out;
}

Vec ito_to_stratonovich_drift(const CoefficientSet& coeffs, double t, const Vec& x,
                              bool use_analytic, double fd_step) {
  Vec b = coeffs.drift(t, x);
  if (!all_finite(b)) throw DomainError("drift evaluated to a non-finite vector");
  for (int alpha = 0; alpha < coeffs.dim_noise; ++alpha) {
    Vec dss = directional_derivative_sigma(coeffs, alpha, t, x, use_analytic, fd_step);
    axpy(-0.5, dss, b);
  }
  return b;
}

double max_lipschitz_quotient(const CoefficientSet& coeffs, double t, double box_radius,
                              int n_pairs, std::uint64_t seed) {
  auto eng = make_engine(seed);
  std::uniform_real_distribution<double> u(-box_radius, box_radius);
  double worst = 0.0;
  const int m = coeffs.dim_state;
  for (int p = 0; p < n_pairs; ++p) {
    Vec x(m), y(m);
    for (int i = 0; i < m; ++i) x[i] = u(eng);
    for (int i = 0; i < m; ++i) y[i] = u(eng);
    double dx = norm(x - y);
    if (dx < 1e-12) continue;
    double num = norm(coeffs.drift(t, x) - coeffs.drift(t, y));
    for (const auto& col : coeffs.diffusion_columns) num += norm(col(t, x) - col(t, y));
    worst = std::max(worst, num / dx);
  }
  return worst;
}

}  // namespace viab
