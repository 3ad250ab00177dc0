#ifndef VIAB_SDE_HPP
#define VIAB_SDE_HPP

#include <cstdint>
#include <vector>

#include "viab/coefficients.hpp"
#include "viab/common.hpp"

// Euler-Maruyama time stepping for the jump diffusion, with the compensated
// Poisson integral handled as explicit jumps plus a drift correction.

namespace viab {

struct JumpEvent {
  double time;
  int mark_index;
  Vec mark;
  Vec pre_state;     // state immediately before the jump
  Vec displacement;  // gamma(t, pre_state, mark)
};

struct PathRecord {
  Vec times;                        // t0 = s_0 < ... < s_N = T
  std::vector<Vec> states;          // N+1 states at grid nodes
  std::vector<JumpEvent> jump_log;  // ordered by time
  std::uint64_t seed = 0;
};

// Simulation output carries the driving noise so closed-form oracles can be
// evaluated on the same realization (shared-noise strong error comparison).
struct SimResult {
  PathRecord path;
  std::vector<Vec> brownian;      // W at nodes (per component), W[0] = 0
  std::vector<int> jump_counts;   // N at nodes (jumps with epoch <= s_i)
};

// Poisson epochs on (t0, T] at rate n(E) via exponential inter-arrivals; each
// epoch carries a mark index drawn with probability weight/n(E).
std::vector<std::pair<double, int>> sample_jump_times(const JumpMeasure& jumps, double t0,
                                                      double T, std::uint64_t seed);

// One explicit Euler step over [t, t+h]:
//   x + b(t,x) h + sum_a sigma_a(t,x) dW_a + sum_j gamma(t, x_pre_j, e_j)
//     - h * sum_e gamma(t,x,e) weight(e)
// Jumps are applied sequentially at their epochs; the continuous part is
// spread over the sub-intervals with coefficients frozen at (t, x) and the
// Brownian increment split linearly in time.
Vec euler_step(const CoefficientSet& coeffs, const JumpMeasure& jumps, double t, const Vec& x,
               double h, const Vec& brownian_increment,
               const std::vector<std::pair<double, int>>& jumps_in_step,
               std::vector<JumpEvent>* jump_log = nullptr);

SimResult simulate(const SDEProblem& problem, int n_steps, std::uint64_t seed);

// Closed-form solutions for the builtin sphere scenarios.
enum class OracleId { Ex33, Ex34, Ex35 };

// States at the given times, from the driving Brownian path (cumulative, per
// node) and jump counts per node. `t` is the initial time of the solution.
std::vector<Vec> closed_form_oracle(OracleId id, double beta, double t, const Vec& times,
                                    const std::vector<Vec>& brownian,
                                    const std::vector<int>& jump_counts);

}  // namespace viab

#endif  // VIAB_SDE_HPP
