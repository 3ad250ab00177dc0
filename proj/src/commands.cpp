#include "viab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <thread>
#include <vector>

#include "viab/csv.hpp"
#include "viab/montecarlo.hpp"
#include "viab/rng.hpp"
#include "viab/scenario.hpp"
#include "viab/supersolution.hpp"
#include "viab/viability.hpp"

namespace viab {

namespace {

struct Loaded {
  Scenario scenario;
  ScenarioRuntime rt;
  std::uint64_t seed;
};

Loaded load(const CommandOptions& opt) {
  Scenario s = load_scenario(opt.scenario_path);
  if (opt.seed) s.seed = *opt.seed;
  ScenarioRuntime rt = build_runtime(s);
  return Loaded{std::move(s), std::move(rt), 0};
}

Vec uniform_times(double t0, double T, int count) {
  Vec times(count);
  if (count == 1) {
    times[0] = t0;
    return times;
  }
  for (int i = 0; i < count; ++i) times[i] = t0 + (T - t0) * i / (count - 1);
  return times;
}

std::string out_path(const CommandOptions& opt, const char* file) {
  std::filesystem::create_directories(opt.out_dir);
  return (std::filesystem::path(opt.out_dir) / file).string();
}

std::vector<std::string> point_headers(int m) {
  std::vector<std::string> h;
  for (int i = 1; i <= m; ++i) h.push_back("x" + std::to_string(i));
  return h;
}

CheckerTolerances profile_tolerances(const Scenario& s, const std::string& profile) {
  CheckerTolerances tol = profile == "fd" ? CheckerTolerances::fd_profile()
                                          : CheckerTolerances::analytic_profile();
  if (s.tol_drift) tol.drift = *s.tol_drift;
  if (s.tol_tangency) tol.tangency = *s.tol_tangency;
  if (s.tol_jump) tol.jump = *s.tol_jump;
  return tol;
}

// Parses "2^-6..2^-12" or a comma-separated list of step sizes.
std::vector<double> parse_ladder(const std::string& spec) {
  std::vector<double> out;
  auto range_pos = spec.find("..");
  auto parse_pow = [](const std::string& s) -> double {
    if (s.rfind("2^", 0) == 0) return std::pow(2.0, std::atof(s.c_str() + 2));
    return std::atof(s.c_str());
  };
  if (range_pos != std::string::npos) {
    double a = parse_pow(spec.substr(0, range_pos));
    double b = parse_pow(spec.substr(range_pos + 2));
    if (!(a > 0.0) || !(b > 0.0)) throw Error("bad ladder spec '" + spec + "'");
    if (a < b) std::swap(a, b);
    for (double h = a; h >= b * (1.0 - 1e-12); h /= 2.0) out.push_back(h);
    return out;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    auto comma = spec.find(',', pos);
    std::string item = spec.substr(pos, comma == std::string::npos ? spec.npos : comma - pos);
    if (!item.empty()) {
      double h = parse_pow(item);
      if (!(h > 0.0)) throw Error("bad ladder entry '" + item + "'");
      out.push_back(h);
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int run_guarded(const char* name, int (*impl)(const CommandOptions&), const CommandOptions& opt) {
  try {
    return impl(opt);
  } catch (const Error& e) {
    std::fprintf(stderr, "%s: error: %s\n", name, e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s: error: %s\n", name, e.what());
    return 2;
  }
}

// ---------------------------------------------------------------- check ----

int check_impl(const CommandOptions& opt) {
  Loaded L = load(opt);
  const Scenario& s = L.scenario;
  CheckerTolerances tol = profile_tolerances(s, opt.tolerance_profile);

  Vec times = uniform_times(s.t0, s.horizon, s.time_samples);
  ViabilityReport rep = check_manifold(L.rt.coefficients, L.rt.jumps, L.rt.manifold, times,
                                       s.sample_count, tol, s.seed, opt.threads);

  CsvWriter csv(out_path(opt, "check_report.csv"), s.content_hash, s.seed);
  auto head = point_headers(L.rt.manifold.ambient_dim);
  std::vector<std::string> names = {"t"};
  names.insert(names.end(), head.begin(), head.end());
  names.insert(names.end(), {"kind", "component", "value"});
  csv.header(names);
  for (const auto& sample : rep.samples) {
    auto emit = [&](const char* kind, long component, double value) {
      csv.begin_row();
      csv.field(sample.time);
      for (double c : sample.point) csv.field(c);
      csv.field(std::string(kind));
      csv.field(component);
      csv.field(value);
      csv.end_row();
    };
    for (std::size_t i = 0; i < sample.drift_residuals.size(); ++i)
      emit("drift", static_cast<long>(i), sample.drift_residuals[i]);
    for (std::size_t a = 0; a < sample.tangency_residuals.size(); ++a)
      for (std::size_t i = 0; i < sample.tangency_residuals[a].size(); ++i)
        emit("tangency", static_cast<long>(a * sample.tangency_residuals[a].size() + i),
             sample.tangency_residuals[a][i]);
    for (std::size_t e = 0; e < sample.jump_residuals.size(); ++e)
      emit("jump", static_cast<long>(e), sample.jump_residuals[e]);
  }

  std::printf("%s: %s  max residuals: drift %.3e (tol %.0e), tangency %.3e (tol %.0e), "
              "jump %.3e (tol %.0e)\n",
              s.name.c_str(), rep.pass ? "PASS" : "FAIL", rep.max_drift, tol.drift,
              rep.max_tangency, tol.tangency, rep.max_jump, tol.jump);
  if (!rep.pass && !rep.worst_point.empty()) {
    std::printf("  worst drift residual %.6e at t=%.4f point (", rep.worst_drift, rep.worst_time);
    for (std::size_t i = 0; i < rep.worst_point.size(); ++i)
      std::printf("%s%.6f", i ? ", " : "", rep.worst_point[i]);
    std::printf(")\n");
  }
  std::printf("  sampled certificate: %d times x %d points (not a proof)\n", rep.n_times,
              rep.n_points);
  return rep.pass ? 0 : 1;
}

// ------------------------------------------------------------- simulate ----

int simulate_impl(const CommandOptions& opt) {
  Loaded L = load(opt);
  const Scenario& s = L.scenario;
  const ImplicitManifold& M = L.rt.manifold;

  const int n_paths = s.n_paths;
  const int n_nodes = s.n_steps + 1;
  const bool sphere_like = s.manifold_kind == "sphere" || s.manifold_kind == "circle";

  struct PathRow {
    double sup = 0.0, term = 0.0, err = 0.0;
    long jumps = 0;
    bool failed = false;
  };
  std::vector<PathRow> rows(n_paths);
  std::vector<std::vector<double>> dist_nodes(n_nodes);  // per node, one value per path
  std::vector<std::vector<double>> radius_nodes(sphere_like ? n_nodes : 0);
  for (auto& v : dist_nodes) v.assign(n_paths, 0.0);
  for (auto& v : radius_nodes) v.assign(n_paths, 0.0);
  struct JumpRow {
    int path;
    double time;
    int mark;
    double pre_dist, post_dist;
  };
  std::vector<std::vector<JumpRow>> jump_rows(n_paths);
  Vec grid_times;

  auto run_path = [&](int p) {
    PathRow& row = rows[p];
    try {
      SimResult sim = simulate(L.rt.problem, s.n_steps, derive_seed(s.seed, p));
      if (p == 0) grid_times = sim.path.times;
      double sup = 0.0;
      for (int i = 0; i < n_nodes; ++i) {
        double dk = std::sqrt(dist2(M, sim.path.states[i]));
        dist_nodes[i][p] = dk;
        if (sphere_like) radius_nodes[i][p] = norm(sim.path.states[i]);
        sup = std::max(sup, dk);
      }
      for (const JumpEvent& j : sim.path.jump_log) {
        Vec post = j.pre_state + j.displacement;
        double pre_dk = std::sqrt(dist2(M, j.pre_state));
        double post_dk = std::sqrt(dist2(M, post));
        sup = std::max(sup, post_dk);
        jump_rows[p].push_back(JumpRow{p, j.time, j.mark_index, pre_dk, post_dk});
      }
      row.sup = sup;
      row.term = std::sqrt(dist2(M, sim.path.states.back()));
      row.jumps = static_cast<long>(sim.path.jump_log.size());
      if (L.rt.oracle) {
        auto ref = closed_form_oracle(*L.rt.oracle, s.beta, s.t0, sim.path.times, sim.brownian,
                                      sim.jump_counts);
        for (int i = 0; i < n_nodes; ++i)
          row.err = std::max(row.err, norm(sim.path.states[i] - ref[i]));
      }
    } catch (const Error&) {
      row.failed = true;
    }
  };

  if (opt.threads <= 1) {
    for (int p = 0; p < n_paths; ++p) run_path(p);
  } else {
    std::vector<std::thread> pool;
    int chunk = (n_paths + opt.threads - 1) / opt.threads;
    for (int w = 0; w < opt.threads; ++w) {
      int lo = w * chunk, hi = std::min(n_paths, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (int p = lo; p < hi; ++p) run_path(p);
      });
    }
    for (auto& th : pool) th.join();
  }

  // per-path summaries
  {
    CsvWriter csv(out_path(opt, "paths.csv"), s.content_hash, s.seed);
    csv.header({"path", "sup_dist", "terminal_dist", "strong_error", "n_jumps", "failed"});
    for (int p = 0; p < n_paths; ++p) {
      csv.begin_row();
      csv.field(static_cast<long>(p));
      csv.field(rows[p].sup);
      csv.field(rows[p].term);
      csv.field(rows[p].err);
      csv.field(rows[p].jumps);
      csv.field(static_cast<long>(rows[p].failed ? 1 : 0));
      csv.end_row();
    }
  }

  // ensemble summary
  KahanSum sup_acc, term_acc, err_acc;
  double max_sup = 0.0;
  int failed = 0;
  for (const PathRow& r : rows) {
    if (r.failed) {
      ++failed;
      continue;
    }
    sup_acc.add(r.sup);
    term_acc.add(r.term);
    err_acc.add(r.err);
    max_sup = std::max(max_sup, r.sup);
  }
  int ok = n_paths - failed;
  if (ok == 0) throw Error("every path failed");
  double mean_sup = sup_acc.value() / ok;
  double mean_term = term_acc.value() / ok;
  {
    CsvWriter csv(out_path(opt, "ensemble.csv"), s.content_hash, s.seed);
    csv.header({"n_paths", "failed", "mean_sup_dist", "max_sup_dist", "mean_terminal_dist",
                "mean_strong_error"});
    csv.begin_row();
    csv.field(static_cast<long>(n_paths));
    csv.field(static_cast<long>(failed));
    csv.field(mean_sup);
    csv.field(max_sup);
    csv.field(mean_term);
    csv.field(err_acc.value() / ok);
    csv.end_row();
  }

  // plot data: d_K quantile bands over time (and radius for sphere scenarios)
  auto band = [&](std::vector<double>& values, double q) {
    std::size_t idx = static_cast<std::size_t>(q * (values.size() - 1));
    std::nth_element(values.begin(), values.begin() + idx, values.end());
    return values[idx];
  };
  {
    CsvWriter csv(out_path(opt, "dist_bands.csv"), s.content_hash, s.seed);
    csv.header({"time", "q10", "q50", "q90", "max"});
    for (int i = 0; i < n_nodes; ++i) {
      std::vector<double> v = dist_nodes[i];
      double mx = *std::max_element(v.begin(), v.end());
      csv.row({grid_times.empty() ? 0.0 : grid_times[i], band(v, 0.10), band(v, 0.50),
               band(v, 0.90), mx});
    }
  }
  if (sphere_like) {
    CsvWriter csv(out_path(opt, "radius.csv"), s.content_hash, s.seed);
    csv.header({"time", "q10", "q50", "q90"});
    for (int i = 0; i < n_nodes; ++i) {
      std::vector<double> v = radius_nodes[i];
      csv.row({grid_times.empty() ? 0.0 : grid_times[i], band(v, 0.10), band(v, 0.50),
               band(v, 0.90)});
    }
  }
  {
    CsvWriter csv(out_path(opt, "jumps.csv"), s.content_hash, s.seed);
    csv.header({"path", "time", "mark", "pre_dist", "post_dist"});
    for (int p = 0; p < n_paths; ++p) {
      for (const JumpRow& j : jump_rows[p]) {
        csv.begin_row();
        csv.field(static_cast<long>(j.path));
        csv.field(j.time);
        csv.field(static_cast<long>(j.mark));
        csv.field(j.pre_dist);
        csv.field(j.post_dist);
        csv.end_row();
      }
    }
  }

  std::printf("%s: simulated %d paths (%d failed), mean sup d_K %.5f, mean terminal d_K %.5f\n",
              s.name.c_str(), n_paths, failed, mean_sup, mean_term);
  return 0;
}

// -------------------------------------------------------- supersolution ----

int supersolution_impl(const CommandOptions& opt) {
  Loaded L = load(opt);
  const Scenario& s = L.scenario;
  const ImplicitManifold& M = L.rt.manifold;
  const double slack_tol = s.tol_slack.value_or(1e-7);

  LipschitzData lip(L.rt.mu, L.rt.rho_sq_integral, L.rt.C);
  if (L.rt.mu_estimated)
    std::printf("%s: mu estimated from sampled difference quotients: %.6f (C = %.6f)\n",
                s.name.c_str(), lip.mu, lip.C);

  // interior time grid in (t0, T)
  Vec times(s.time_samples);
  for (int i = 0; i < s.time_samples; ++i)
    times[i] = s.t0 + (s.horizon - s.t0) * (i + 1) / (s.time_samples + 1);

  CsvWriter csv(out_path(opt, "slack.csv"), s.content_hash, s.seed);
  auto head = point_headers(M.ambient_dim);
  std::vector<std::string> names = {"radius", "t"};
  names.insert(names.end(), head.begin(), head.end());
  names.insert(names.end(), {"dist", "generator", "slack"});
  csv.header(names);

  bool all_pass = true;
  double radius = M.tube_radius;
  for (int rung = 0; rung < 4; ++rung, radius /= 2.0) {
    TubeGrid grid = make_tube_grid(M, radius, s.sample_count, times, derive_seed(s.seed, rung));
    SupersolutionReport rep =
        check_supersolution(L.rt.coefficients, L.rt.jumps, M, lip, grid, slack_tol);
    for (const auto& row : rep.rows) {
      csv.begin_row();
      csv.field(radius);
      csv.field(row.t);
      for (double c : row.x) csv.field(c);
      csv.field(row.dist);
      csv.field(row.generator);
      csv.field(row.slack);
      csv.end_row();
    }
    std::printf("%s: radius %.4f  max slack %.3e  %s (skipped %d)\n", s.name.c_str(), radius,
                rep.max_slack, rep.pass ? "PASS" : "FAIL", rep.skipped_points);
    all_pass = all_pass && rep.pass;
  }
  std::printf("%s: supersolution %s with C = %.6f\n", s.name.c_str(),
              all_pass ? "PASS" : "FAIL", lip.C);
  return all_pass ? 0 : 1;
}

// ---------------------------------------------------------- convergence ----

int convergence_impl(const CommandOptions& opt) {
  Loaded L = load(opt);
  const Scenario& s = L.scenario;
  if (!s.builtin) throw Error("convergence requires a builtin scenario (closed-form oracle)");

  std::vector<double> ladder = parse_ladder(opt.ladder);
  ConvergenceCase which = *s.builtin == BuiltinId::Ex33   ? ConvergenceCase::Ex33
                          : *s.builtin == BuiltinId::Ex34 ? ConvergenceCase::Ex34
                                                          : ConvergenceCase::Ex35;
  ConvergenceReport rep = convergence_rate(which, s.beta, s.lambda, ladder, s.n_paths, s.seed);

  CsvWriter csv(out_path(opt, "convergence.csv"), s.content_hash, s.seed);
  csv.header({"h", "mean_strong_error"});
  for (const auto& row : rep.rows) csv.row({row.h, row.mean_error});

  std::printf("%s: fitted strong order %.4f over %zu rungs%s\n", s.name.c_str(), rep.slope,
              rep.rows.size(), rep.exact_match ? " (exact match on some rungs)" : "");
  return 0;
}

}  // namespace

int cmd_check(const CommandOptions& opt) { return run_guarded("check", check_impl, opt); }
int cmd_simulate(const CommandOptions& opt) { return run_guarded("simulate", simulate_impl, opt); }
int cmd_supersolution(const CommandOptions& opt) {
  return run_guarded("supersolution", supersolution_impl, opt);
}
int cmd_convergence(const CommandOptions& opt) {
  return run_guarded("convergence", convergence_impl, opt);
}

}  // namespace viab
