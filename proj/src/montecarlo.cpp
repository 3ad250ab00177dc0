#include "viab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "viab/builtin.hpp"
#include "viab/rng.hpp"
#include "viab/viability.hpp"

namespace viab {

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double w = pos - lo;
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

double mean_of(const std::vector<double>& v) {
  KahanSum s;
  for (double a : v) s.add(a);
  return v.empty() ? 0.0 : s.value() / v.size();
}

}  // namespace

EnsembleStats run_ensemble(const SDEProblem& problem, const ImplicitManifold& M, int n_paths,
                           int n_steps, std::uint64_t root_seed,
                           const std::optional<OracleSpec>& oracle, int threads) {
  if (n_paths < 1) throw Error("run_ensemble: n_paths must be >= 1");
  problem.validate();

  EnsembleStats stats;
  stats.n_paths = n_paths;
  stats.seed = root_seed;

  struct Slot {
    double sup = 0.0;
    double term = 0.0;
    double err = 0.0;
    bool failed = false;
  };
  std::vector<Slot> slots(n_paths);

  auto run_path = [&](int p) {
    Slot& slot = slots[p];
    try {
      SimResult sim = simulate(problem, n_steps, derive_seed(root_seed, p));
      double sup = 0.0;
      for (const Vec& x : sim.path.states) sup = std::max(sup, std::sqrt(dist2(M, x)));
      for (const JumpEvent& j : sim.path.jump_log)
        sup = std::max(sup, std::sqrt(dist2(M, j.pre_state + j.displacement)));
      slot.sup = sup;
      slot.term = std::sqrt(dist2(M, sim.path.states.back()));
      if (oracle) {
        auto ref = closed_form_oracle(oracle->id, oracle->beta, problem.t0, sim.path.times,
                                      sim.brownian, sim.jump_counts);
        double worst = 0.0;
        for (std::size_t i = 0; i < ref.size(); ++i)
          worst = std::max(worst, norm(sim.path.states[i] - ref[i]));
        slot.err = worst;
      }
    } catch (const Error&) {
      slot.failed = true;
    }
  };

  if (threads <= 1 || n_paths < 8) {
    for (int p = 0; p < n_paths; ++p) run_path(p);
  } else {
    std::vector<std::thread> pool;
    int chunk = (n_paths + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
      int lo = w * chunk, hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (int p = lo; p < hi; ++p) run_path(p);
      });
    }
    for (auto& th : pool) th.join();
  }

  for (const Slot& s : slots) {
    if (s.failed) {
      ++stats.error_count;
      continue;
    }
    stats.sup_dist.push_back(s.sup);
    stats.terminal_dist.push_back(s.term);
    if (oracle) stats.strong_errors.push_back(s.err);
  }
  if (stats.sup_dist.empty()) throw Error("run_ensemble: every path failed");

  stats.mean_sup_dist = mean_of(stats.sup_dist);
  stats.max_sup_dist = *std::max_element(stats.sup_dist.begin(), stats.sup_dist.end());
  std::vector<double> sorted = stats.sup_dist;
  std::sort(sorted.begin(), sorted.end());
  stats.q50_sup_dist = quantile_sorted(sorted, 0.5);
  stats.q90_sup_dist = quantile_sorted(sorted, 0.9);
  stats.mean_terminal_dist = mean_of(stats.terminal_dist);
  stats.max_terminal_dist =
      *std::max_element(stats.terminal_dist.begin(), stats.terminal_dist.end());
  if (!stats.strong_errors.empty()) stats.mean_strong_error = mean_of(stats.strong_errors);
  return stats;
}

namespace {

struct CasePack {
  SDEProblem problem;
  std::optional<OracleSpec> oracle;
};

CasePack make_case(ConvergenceCase which, double beta, double lambda) {
  switch (which) {
    case ConvergenceCase::Ex33: {
      auto b = make_builtin(BuiltinId::Ex33, beta);
      return {b.problem, OracleSpec{OracleId::Ex33, beta}};
    }
    case ConvergenceCase::Ex34: {
      auto b = make_builtin(BuiltinId::Ex34, beta);
      return {b.problem, OracleSpec{OracleId::Ex34, beta}};
    }
    case ConvergenceCase::Ex35: {
      auto b = make_builtin(BuiltinId::Ex35, beta, lambda);
      return {b.problem, OracleSpec{OracleId::Ex35, beta}};
    }
    case ConvergenceCase::DriftLinear: {
      // dX = -X dt, X_t = e^{-(s-t)} x0: Euler converges at first order.
      SDEProblem p;
      p.coefficients.dim_state = 1;
      p.coefficients.dim_noise = 0;
      p.coefficients.drift = [](double, const Vec& x) { return Vec{-x[0]}; };
      p.t0 = 0.0;
      p.horizon = 1.0;
      p.x0 = Vec{1.0};
      return {p, std::nullopt};
    }
  }
  throw Error("bad convergence case");
}

}  // namespace

ConvergenceReport convergence_rate(ConvergenceCase which, double beta, double lambda,
                                   const std::vector<double>& step_ladder, int n_paths,
                                   std::uint64_t seed) {
  if (step_ladder.size() < 4) throw Error("insufficient step ladder (need >= 4 rungs)");
  for (double h : step_ladder)
    if (!(h > 0.0)) throw Error("step ladder entries must be positive");
  if (n_paths < 1) throw Error("convergence_rate: n_paths must be >= 1");

  CasePack pack = make_case(which, beta, lambda);
  const double span = pack.problem.horizon - pack.problem.t0;

  ConvergenceReport rep;
  for (std::size_t r = 0; r < step_ladder.size(); ++r) {
    int n_steps = std::max(1, static_cast<int>(std::llround(span / step_ladder[r])));
    double h = span / n_steps;
    KahanSum acc;
    for (int p = 0; p < n_paths; ++p) {
      SimResult sim = simulate(pack.problem, n_steps, derive_seed(seed, r, p));
      double worst = 0.0;
      if (pack.oracle) {
        auto ref = closed_form_oracle(pack.oracle->id, pack.oracle->beta, pack.problem.t0,
                                      sim.path.times, sim.brownian, sim.jump_counts);
        for (std::size_t i = 0; i < ref.size(); ++i)
          worst = std::max(worst, norm(sim.path.states[i] - ref[i]));
      } else {
        for (std::size_t i = 0; i < sim.path.times.size(); ++i) {
          double exact = std::exp(-(sim.path.times[i] - pack.problem.t0)) * pack.problem.x0[0];
          worst = std::max(worst, std::abs(sim.path.states[i][0] - exact));
        }
      }
      acc.add(worst);
    }
    rep.rows.push_back(ConvergenceRow{h, acc.value() / n_paths});
  }

  // least squares on (log h, log err) over nonzero rungs
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : rep.rows) {
    if (row.mean_error <= 0.0)
      rep.exact_match = true;
    else
      pts.emplace_back(std::log(row.h), std::log(row.mean_error));
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double n = static_cast<double>(pts.size());
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return rep;
}

CoherenceVerdict coherence_test(ConvergenceCase which, double beta, double lambda,
                                const CoherenceTolerances& tol, std::uint64_t seed) {
  if (which == ConvergenceCase::DriftLinear) throw Error("coherence_test needs a sphere scenario");
  BuiltinId id = which == ConvergenceCase::Ex33   ? BuiltinId::Ex33
                 : which == ConvergenceCase::Ex34 ? BuiltinId::Ex34
                                                  : BuiltinId::Ex35;
  auto b = make_builtin(id, beta, lambda);
  auto M = make_sphere();

  Vec times;
  for (int i = 0; i < 20; ++i) times.push_back(i / 19.0);
  auto report = check_manifold(b.coefficients, b.jumps, M, times, 200,
                               CheckerTolerances::analytic_profile(), derive_seed(seed, 1));

  auto stats = run_ensemble(b.problem, M, 500, 1000, derive_seed(seed, 2),
                            OracleSpec{b.oracle, beta});

  CoherenceVerdict v;
  v.checker_pass = report.pass;
  v.max_drift_residual = report.max_drift;
  v.mean_sup_dist = stats.mean_sup_dist;
  v.mean_terminal_dist = stats.mean_terminal_dist;
  v.coherent = report.pass ? (stats.mean_sup_dist <= tol.viab_stat_tol)
                           : (stats.mean_terminal_dist >= tol.fail_floor);
  return v;
}

}  // namespace viab
