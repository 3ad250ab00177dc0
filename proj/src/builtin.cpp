#include "viab/builtin.hpp"

#include <cmath>

namespace viab {

BuiltinId builtin_from_name(const std::string& name) {
  if (name == "ex33") return BuiltinId::Ex33;
  if (name == "ex34") return BuiltinId::Ex34;
  if (name == "ex35") return BuiltinId::Ex35;
  throw Error("unknown builtin scenario '" + name + "'");
}

const char* builtin_name(BuiltinId id) {
  switch (id) {
    case BuiltinId::Ex33: return "ex33";
    case BuiltinId::Ex34: return "ex34";
    case BuiltinId::Ex35: return "ex35";
  }
  return "?";
}

BuiltinScenario make_builtin(BuiltinId id, double beta, double lambda, double t0,
                             double horizon) {
  CoefficientSet c;
  c.dim_state = 3;
  c.dim_noise = 1;
  c.diffusion_columns = {[](double, const Vec& x) {
    return Vec{0.0, -x[2], x[1]};
  }};
  // <D sigma, sigma> for sigma = (0, -x3, x2)
  c.sigma_self_derivative = {[](double, const Vec& x) {
    return Vec{0.0, -x[1], -x[2]};
  }};

  JumpMeasure jumps;
  double mu, rho_sq;
  switch (id) {
    case BuiltinId::Ex33:
      c.drift = [](double, const Vec& x) { return Vec{0.0, -0.5 * x[1], -0.5 * x[2]}; };
      mu = 2.0;
      rho_sq = 0.0;
      break;
    case BuiltinId::Ex34:
      c.drift = [](double, const Vec& x) { return Vec{0.0, -1.5 * x[1], -1.5 * x[2]}; };
      mu = 2.5;
      rho_sq = 0.0;
      break;
    case BuiltinId::Ex35:
      if (lambda < 0.0) throw Error("ex35 requires lambda >= 0");
      c.drift = [lambda](double, const Vec& x) {
        return Vec{0.0, -0.5 * x[1] - 2.0 * lambda * x[1], -0.5 * x[2] - 2.0 * lambda * x[2]};
      };
      c.jump = [](double, const Vec& x, const Vec&) {
        return Vec{0.0, -2.0 * x[1], -2.0 * x[2]};
      };
      // single mark of weight lambda; |gamma(x)-gamma(x')| <= 2 |x-x'|
      if (lambda > 0.0) jumps.marks = {Mark{Vec{1.0}, lambda}};
      mu = 1.5 + 2.0 * lambda;
      rho_sq = 4.0 * lambda;
      break;
    default: throw Error("bad builtin id");
  }

  SDEProblem p;
  p.coefficients = c;
  p.jumps = jumps;
  p.t0 = t0;
  p.horizon = horizon;
  p.x0 = Vec{std::cos(beta), std::sin(beta), 0.0};

  OracleId oracle = id == BuiltinId::Ex33   ? OracleId::Ex33
                    : id == BuiltinId::Ex34 ? OracleId::Ex34
                                            : OracleId::Ex35;

  return BuiltinScenario{std::move(c), std::move(jumps), LipschitzData(mu, rho_sq),
                         std::move(p), oracle, beta, lambda};
}

}  // namespace viab
