#include "viab/supersolution.hpp"

#include <algorithm>
#include <cmath>

namespace viab {

TubeGrid make_tube_grid(const ImplicitManifold& M, double radius, int n_points, const Vec& times,
                        std::uint64_t seed) {
  TubeGrid g;
  g.radius = radius;
  g.times = times;
  g.points = sample_tube(M, n_points, radius, seed);
  return g;
}

double generator_apply(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                       const ImplicitManifold& M, double t, const Vec& x) {
  Vec grad = grad_dist2(M, x);
  Mat hess = hess_dist2(M, x);

  Vec b = coeffs.drift(t, x);
  if (!all_finite(b)) throw DomainError("drift non-finite in generator");
  double val = dot(grad, b);

  // 1/2 tr[H sigma sigma^T] = 1/2 sum_a sigma_a^T H sigma_a
  for (int a = 0; a < coeffs.dim_noise; ++a) {
    Vec s = coeffs.diffusion_columns[a](t, x);
    if (!all_finite(s)) throw DomainError("sigma non-finite in generator");
    Vec hs = matvec(hess, s);
    val += 0.5 * dot(s, hs);
  }

  if (coeffs.jump && !jumps.empty()) {
    double d2x = dist2(M, x);
    for (std::size_t e = 0; e < jumps.marks.size(); ++e) {
      const Mark& mk = jumps.marks[e];
      Vec g = coeffs.jump(t, x, mk.point);
      if (!all_finite(g)) throw DomainError("gamma non-finite in generator");
      double d2y;
      try {
        d2y = dist2(M, x + g);
      } catch (const GeometryError&) {
        throw DomainError("post-jump point left the projection domain (mark " +
                          std::to_string(e) + ")");
      }
      val += (d2y - d2x - dot(grad, g)) * mk.weight;
    }
  }
  return val;
}

SupersolutionReport check_supersolution(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                                        const ImplicitManifold& M, const LipschitzData& lip,
                                        const TubeGrid& grid, double slack_tol) {
  SupersolutionReport rep;
  rep.slack_tol = slack_tol;
  rep.C = lip.C;
  rep.rows.reserve(grid.points.size() * grid.times.size());

  for (double t : grid.times) {
    for (const Vec& x : grid.points) {
      double d2 = dist2(M, x);
      double gen;
      try {
        gen = generator_apply(coeffs, jumps, M, t, x);
      } catch (const DomainError&) {
        ++rep.skipped_points;
        continue;
      }
      double slack = gen - (lip.C - 1.0) * d2;
      rep.rows.push_back(SupersolutionRow{t, x, std::sqrt(d2), gen, slack});
      if (slack > rep.max_slack) {
        rep.max_slack = slack;
        rep.worst_point = x;
        rep.worst_time = t;
      }
    }
  }
  if (rep.rows.empty()) throw Error("check_supersolution: no usable grid points");
  rep.pass = rep.max_slack <= slack_tol;
  return rep;
}

namespace {

// V_sigma d^2 (x) = <grad d^2(x), sigma(t0, x)>, autonomous evaluation at the
// first grid time.
double v_sigma_d2(const CoefficientSet& coeffs, int alpha, const ImplicitManifold& M, double t,
                  const Vec& x) {
  Vec g = grad_dist2(M, x);
  Vec s = coeffs.diffusion_columns[alpha](t, x);
  return dot(g, s);
}

}  // namespace

LyapunovRatios lyapunov_ratios(const CoefficientSet& coeffs, const ImplicitManifold& M,
                           const TubeGrid& grid, double fd_step) {
  LyapunovRatios out;
  const double t = grid.times.empty() ? 0.0 : grid.times.front();
  for (const Vec& x : grid.points) {
    double d2 = dist2(M, x);
    if (d2 < 1e-14) continue;
    for (int a = 0; a < coeffs.dim_noise; ++a) {
      double first = v_sigma_d2(coeffs, a, M, t, x);
      out.first = std::max(out.first, std::abs(first) / d2);

      Vec s = coeffs.diffusion_columns[a](t, x);
      double len = norm(s);
      if (len == 0.0) continue;
      Vec unit = (1.0 / len) * s;
      Vec xp = x, xm = x;
      axpy(fd_step, unit, xp);
      axpy(-fd_step, unit, xm);
      double second = (v_sigma_d2(coeffs, a, M, t, xp) - v_sigma_d2(coeffs, a, M, t, xm)) /
                      (2.0 * fd_step) * len;
      out.second = std::max(out.second, std::abs(second) / d2);
    }
  }
  return out;
}

}  // namespace viab
