#ifndef VIAB_SUPERSOLUTION_HPP
#define VIAB_SUPERSOLUTION_HPP

#include <cstdint>
#include <limits>
#include <vector>

#include "viab/coefficients.hpp"
#include "viab/manifold.hpp"

// Verifies on a tube grid that phi = d_K^2 satisfies the supersolution
// inequality
//   L phi + B phi <= (C - 1) d_K^2,
// where L phi = <D phi, b> + 1/2 tr[D^2 phi sigma sigma^T] and
// B phi = sum_e [phi(x + gamma) - phi(x) - <D phi, gamma>] w(e).

namespace viab {

struct TubeGrid {
  std::vector<Vec> points;  // 0 < d_K <= radius
  Vec times;
  double radius = 0.0;
};

TubeGrid make_tube_grid(const ImplicitManifold& M, double radius, int n_points,
                        const Vec& times, std::uint64_t seed);

// (L + B) d_K^2 at (t, x). Throws DomainError naming the offending mark when a
// post-jump point leaves the projection domain and no global distance exists.
double generator_apply(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                       const ImplicitManifold& M, double t, const Vec& x);

struct SupersolutionRow {
  double t;
  Vec x;
  double dist;       // d_K
  double generator;  // (L + B) d_K^2
  double slack;      // generator - (C-1) d_K^2
};

struct SupersolutionReport {
  std::vector<SupersolutionRow> rows;
  double max_slack = -std::numeric_limits<double>::infinity();
  Vec worst_point;
  double worst_time = 0.0;
  int skipped_points = 0;  // post-jump image left the projection domain
  double slack_tol = 1e-7;
  bool pass = false;
  double C = 0.0;
};

SupersolutionReport check_supersolution(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                                        const ImplicitManifold& M, const LipschitzData& lip,
                                        const TubeGrid& grid, double slack_tol = 1e-7);

// Empirical tangency-defect ratios: max over the grid and
// diffusion columns of |V_sigma d^2| / d^2 and |V_sigma V_sigma d^2| / d^2.
// Points with d^2 < 1e-14 are excluded from the quotients.
struct LyapunovRatios {
  double first = 0.0;   // |V d^2| / d^2
  double second = 0.0;  // |V V d^2| / d^2
};

LyapunovRatios lyapunov_ratios(const CoefficientSet& coeffs, const ImplicitManifold& M,
                           const TubeGrid& grid, double fd_step = 1e-5);

}  // namespace viab

#endif  // VIAB_SUPERSOLUTION_HPP
