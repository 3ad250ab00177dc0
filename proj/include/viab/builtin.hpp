#ifndef VIAB_BUILTIN_HPP
#define VIAB_BUILTIN_HPP

#include <string>

#include "viab/coefficients.hpp"
#include "viab/sde.hpp"

// The three builtin sphere scenarios. All share the diffusion column
// sigma = (0, -x3, x2) and start at x0 = (cos beta, sin beta, 0); ex35 adds
// reflection jumps (0, -2 x2, -2 x3) driven by a rate-lambda Poisson clock.

namespace viab {

enum class BuiltinId { Ex33, Ex34, Ex35 };

BuiltinId builtin_from_name(const std::string& name);
const char* builtin_name(BuiltinId id);

struct BuiltinScenario {
  CoefficientSet coefficients;
  JumpMeasure jumps;
  LipschitzData lipschitz;
  SDEProblem problem;
  OracleId oracle;
  double beta = 0.0;
  double lambda = 0.0;
};

BuiltinScenario make_builtin(BuiltinId id, double beta, double lambda = 0.0, double t0 = 0.0,
                             double horizon = 1.0);

}  // namespace viab

#endif  // VIAB_BUILTIN_HPP
