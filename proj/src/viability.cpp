#include "viab/viability.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace viab {

ConditionResiduals check_point_with_normals(const CoefficientSet& coeffs,
                                            const JumpMeasure& jumps, const ImplicitManifold& M,
                                            double t, const Vec& xbar,
                                            const std::vector<Vec>& normals,
                                            const CheckerTolerances& tol) {
  ConditionResiduals r;
  r.point = xbar;
  r.time = t;

  Vec b = coeffs.drift(t, xbar);
  if (!all_finite(b)) throw DomainError("drift non-finite at checker point");

  std::vector<Vec> sigma(coeffs.dim_noise);
  std::vector<Vec> dss(coeffs.dim_noise);
  for (int a = 0; a < coeffs.dim_noise; ++a) {
    sigma[a] = coeffs.diffusion_columns[a](t, xbar);
    if (!all_finite(sigma[a])) throw DomainError("sigma non-finite at checker point");
    dss[a] = directional_derivative_sigma(coeffs, a, t, xbar, tol.use_analytic, tol.fd_step);
  }

  std::vector<Vec> gammas;
  if (coeffs.jump) {
    gammas.reserve(jumps.marks.size());
    for (const Mark& mk : jumps.marks) {
      Vec g = coeffs.jump(t, xbar, mk.point);
      if (!all_finite(g)) throw DomainError("gamma non-finite at checker point");
      gammas.push_back(std::move(g));
    }
  }

  r.drift_residuals.reserve(normals.size());
  for (const Vec& m : normals) {
    double v = 2.0 * dot(b, m);
    for (int a = 0; a < coeffs.dim_noise; ++a) v -= dot(dss[a], m);
    for (std::size_t e = 0; e < gammas.size(); ++e)
      v -= 2.0 * dot(gammas[e], m) * jumps.marks[e].weight;
    r.drift_residuals.push_back(v);
  }

  r.tangency_residuals.resize(coeffs.dim_noise);
  for (int a = 0; a < coeffs.dim_noise; ++a) {
    r.tangency_residuals[a].reserve(normals.size());
    for (const Vec& m : normals) r.tangency_residuals[a].push_back(dot(sigma[a], m));
  }

  // Jump condition: the post-jump point must land on K; exact finite sum over
  // the discrete measure, one residual per mark.
  r.jump_residuals.reserve(gammas.size());
  for (const Vec& g : gammas) r.jump_residuals.push_back(std::sqrt(dist2(M, xbar + g)));

  return r;
}

ConditionResiduals check_point(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                               const ImplicitManifold& M, double t, const Vec& xbar,
                               const CheckerTolerances& tol) {
  NormalBasis nb = normal_basis(M, xbar);
  return check_point_with_normals(coeffs, jumps, M, t, xbar, nb.vectors, tol);
}

namespace {

void fold_sample(const ConditionResiduals& s, ViabilityReport& rep) {
  for (double v : s.drift_residuals) {
    if (std::abs(v) > rep.max_drift) {
      rep.max_drift = std::abs(v);
      rep.worst_drift = v;
      rep.worst_point = s.point;
      rep.worst_time = s.time;
    }
  }
  for (const auto& per_alpha : s.tangency_residuals)
    for (double v : per_alpha) rep.max_tangency = std::max(rep.max_tangency, std::abs(v));
  for (double v : s.jump_residuals) rep.max_jump = std::max(rep.max_jump, std::abs(v));
}

}  // namespace

ViabilityReport check_manifold(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                               const ImplicitManifold& M, const Vec& time_grid, int sample_count,
                               const CheckerTolerances& tol, std::uint64_t seed, int threads) {
  if (sample_count < 1) throw Error("check_manifold: sample_count must be >= 1");
  if (time_grid.empty()) throw Error("check_manifold: empty time grid");

  auto points = sample_manifold(M, sample_count, seed);

  ViabilityReport rep;
  rep.tolerances = tol;
  rep.n_times = static_cast<int>(time_grid.size());
  rep.n_points = sample_count;
  rep.samples.resize(time_grid.size() * points.size());

  auto run_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t idx = lo; idx < hi; ++idx) {
      std::size_t ti = idx / points.size();
      std::size_t pi = idx % points.size();
      rep.samples[idx] = check_point(coeffs, jumps, M, time_grid[ti], points[pi], tol);
    }
  };

  const std::size_t total = rep.samples.size();
  if (threads <= 1 || total < 64) {
    run_range(0, total);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (total + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(total, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // deterministic sequential reduction
  for (const auto& s : rep.samples) fold_sample(s, rep);

  rep.drift_pass = rep.max_drift <= tol.drift;
  rep.tangency_pass = rep.max_tangency <= tol.tangency;
  rep.jump_pass = rep.max_jump <= tol.jump;
  rep.pass = rep.drift_pass && rep.tangency_pass && rep.jump_pass;
  return rep;
}

double sphere_form_drift_residual(const CoefficientSet& coeffs, const JumpMeasure& jumps,
                                  double t, const Vec& xbar) {
  Vec b = coeffs.drift(t, xbar);
  double v = 2.0 * dot(b, xbar);
  for (int a = 0; a < coeffs.dim_noise; ++a) {
    Vec s = coeffs.diffusion_columns[a](t, xbar);
    v += dot(s, s);
  }
  if (coeffs.jump) {
    for (const Mark& mk : jumps.marks)
      v -= 2.0 * dot(coeffs.jump(t, xbar, mk.point), xbar) * mk.weight;
  }
  return v;
}

}  // namespace viab
