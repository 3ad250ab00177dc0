#include "viab/sde.hpp"

#include <algorithm>
#include <cmath>

#include "viab/rng.hpp"

namespace viab {

std::vector<std::pair<double, int>> sample_jump_times(const JumpMeasure& jumps, double t0,
                                                      double T, std::uint64_t seed) {
  std::vector<std::pair<double, int>> out;
  double mass = jumps.total_mass();
  if (mass <= 0.0 || T <= t0) return out;

  auto eng = make_engine(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  double t = t0;
  for (;;) {
    double u = u01(eng);
    t += -std::log1p(-u) / mass;  // Exp(mass) inter-arrival
    if (t > T) break;
    // mark index by inverse cdf over the weights
    double target = u01(eng) * mass;
    double acc = 0.0;
    int idx = static_cast<int>(jumps.marks.size()) - 1;
    for (std::size_t i = 0; i < jumps.marks.size(); ++i) {
      acc += jumps.marks[i].weight;
      if (target <= acc) {
        idx = static_cast<int>(i);
        break;
      }
    }
    out.emplace_back(t, idx);
  }
  return out;
}

namespace {

// Compensator drift sum_e gamma(t,x,e) weight(e).
Vec compensator(const CoefficientSet& coeffs, const JumpMeasure& jumps, double t, const Vec& x) {
  Vec c(x.size(), 0.0);
  if (!coeffs.jump || jumps.empty()) return c;
  for (const Mark& m : jumps.marks) {
    Vec g = coeffs.jump(t, x, m.point);
    axpy(m.weight, g, c);
  }
  return c;
}

}  // namespace

Vec euler_step(const CoefficientSet& coeffs, const JumpMeasure& jumps, double t, const Vec& x,
               double h, const Vec& brownian_increment,
               const std::vector<std::pair<double, int>>& jumps_in_step,
               std::vector<JumpEvent>* jump_log) {
  if (h <= 0.0) throw Error("euler_step: h must be positive");

  Vec b = coeffs.drift(t, x);
  if (!all_finite(b)) throw SimulationError("drift non-finite", t, x);
  Vec diffusion(x.size(), 0.0);
  for (int a = 0; a < coeffs.dim_noise; ++a) {
    Vec col = coeffs.diffusion_columns[a](t, x);
    if (!all_finite(col)) throw SimulationError("sigma non-finite", t, x);
    axpy(brownian_increment[a], col, diffusion);
  }
  Vec comp = compensator(coeffs, jumps, t, x);
  if (!all_finite(comp)) throw SimulationError("jump compensator non-finite", t, x);

  // Continuous increment with coefficients frozen at (t,x).
  Vec rate = b - comp;  // per unit time
  Vec y = x;
  if (jumps_in_step.empty()) {
    axpy(h, rate, y);
    y = y + diffusion;
  } else {
    // Split the step at the jump epochs; drift/compensator scale with the
    // sub-interval length and the Brownian increment is split linearly.
    double t_prev = t;
    for (const auto& [tau, mark_idx] : jumps_in_step) {
      double frac = (tau - t_prev) / h;
      axpy(frac * h, rate, y);
      axpy(frac, diffusion, y);
      const Mark& mark = jumps.marks[mark_idx];
      Vec disp = coeffs.jump(tau, y, mark.point);
      if (!all_finite(disp)) throw SimulationError("gamma non-finite", tau, y);
      if (jump_log) jump_log->push_back(JumpEvent{tau, mark_idx, mark.point, y, disp});
      y = y + disp;
      t_prev = tau;
    }
    double frac = (t + h - t_prev) / h;
    axpy(frac * h, rate, y);
    axpy(frac, diffusion, y);
  }
  if (!all_finite(y)) throw SimulationError("state non-finite after step", t, x);
  return y;
}

SimResult simulate(const SDEProblem& problem, int n_steps, std::uint64_t seed) {
  problem.validate();
  if (n_steps < 1) throw Error("simulate: n_steps must be >= 1");
  const auto& coeffs = problem.coefficients;
  const double t0 = problem.t0;
  const double T = problem.horizon;

  SimResult res;
  res.path.seed = seed;

  if (T == t0) {  // degenerate horizon: a single-node path
    res.path.times = {t0};
    res.path.states = {problem.x0};
    res.brownian = {Vec(coeffs.dim_noise, 0.0)};
    res.jump_counts = {0};
    return res;
  }

  const double h = (T - t0) / n_steps;
  auto brownian_eng = make_engine(derive_seed(seed, stream::kBrownian));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto jump_times =
      sample_jump_times(problem.jumps, t0, T, derive_seed(seed, stream::kJumps));

  res.path.times.resize(n_steps + 1);
  res.path.states.resize(n_steps + 1);
  res.brownian.resize(n_steps + 1);
  res.jump_counts.resize(n_steps + 1);

  res.path.times[0] = t0;
  res.path.states[0] = problem.x0;
  res.brownian[0] = Vec(coeffs.dim_noise, 0.0);
  res.jump_counts[0] = 0;

  const double sqrt_h = std::sqrt(h);
  std::size_t jump_cursor = 0;
  Vec x = problem.x0;
  Vec w(coeffs.dim_noise, 0.0);

  for (int step = 0; step < n_steps; ++step) {
    double t = t0 + step * h;
    double t_next = (step + 1 == n_steps) ? T : t0 + (step + 1) * h;

    Vec dw(coeffs.dim_noise);
    for (int a = 0; a < coeffs.dim_noise; ++a) dw[a] = sqrt_h * gauss(brownian_eng);

    std::vector<std::pair<double, int>> in_step;
    while (jump_cursor < jump_times.size() && jump_times[jump_cursor].first <= t_next) {
      in_step.push_back(jump_times[jump_cursor]);
      ++jump_cursor;
    }

    try {
      x = euler_step(coeffs, problem.jumps, t, x, h, dw, in_step, &res.path.jump_log);
    } catch (const SimulationError& e) {
      throw SimulationError(std::string(e.what()) + " at step " + std::to_string(step), e.time,
                            e.state, step);
    }

    for (int a = 0; a < coeffs.dim_noise; ++a) w[a] += dw[a];
    res.path.times[step + 1] = t_next;
    res.path.states[step + 1] = x;
    res.brownian[step + 1] = w;
    res.jump_counts[step + 1] = static_cast<int>(jump_cursor);
  }
  return res;
}

std::vector<Vec> closed_form_oracle(OracleId id, double beta, double t, const Vec& times,
                                    const std::vector<Vec>& brownian,
                                    const std::vector<int>& jump_counts) {
  const double cb = std::cos(beta);
  const double sb = std::sin(beta);
  std::vector<Vec> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    double dw = brownian[i][0];  // W_s - W_t (cumulative from the start node)
    double phase = dw;
    double factor = 1.0;
    switch (id) {
      case OracleId::Ex33:
        break;
      case OracleId::Ex34:
        factor = std::exp(-(times[i] - t));
        break;
      case OracleId::Ex35:
        phase = dw + M_PI * jump_counts[i];
        break;
    }
    out[i] = Vec{cb, sb * factor * std::cos(phase), sb * factor * std::sin(phase)};
  }
  return out;
}

}  // namespace viab
