#include "viab/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "viab/dsl.hpp"
#include "viab/rng.hpp"

namespace viab {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

struct Line {
  int number;
  std::string section;
  std::string key;
  std::vector<std::string> values;  // comma-split, trimmed, quotes stripped
  bool quoted;                      // at least one value was quoted
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Splits on commas outside double quotes; strips one layer of quotes.
std::vector<std::string> split_values(const std::string& raw, int line, bool* quoted) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quote = false;
  *quoted = false;
  for (char c : raw) {
    if (c == '"') {
      in_quote = !in_quote;
      *quoted = true;
      continue;
    }
    if (c == ',' && !in_quote) {
      out.push_back(trim(cur));
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (in_quote) throw ScenarioError("line " + std::to_string(line) + ": unterminated quote", line);
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, int line) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw ScenarioError("line " + std::to_string(line) + ": expected a number, got '" + s + "'",
                        line);
  return v;
}

long parse_int(const std::string& s, int line) {
  double v = parse_number(s, line);
  long n = static_cast<long>(v);
  if (static_cast<double>(n) != v)
    throw ScenarioError("line " + std::to_string(line) + ": expected an integer, got '" + s + "'",
                        line);
  return n;
}

std::uint64_t parse_u64(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ScenarioError("line " + std::to_string(line) + ": expected an unsigned integer, got '" +
                            s + "'",
                        line);
  }
}

bool is_sigma_key(const std::string& key, int* index) {
  if (key.size() < 6 || key.compare(0, 5, "sigma") != 0) return false;
  for (std::size_t i = 5; i < key.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(key[i]))) return false;
  *index = std::atoi(key.c_str() + 5);
  return *index >= 1;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& path_for_errors) {
  Scenario s;
  s.content_hash = fnv1a64(text);
  s.source_path = path_for_errors;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::vector<Line> lines;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string t = trim(raw);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ScenarioError("line " + std::to_string(line_no) + ": malformed section header",
                            line_no);
      section = trim(t.substr(1, t.size() - 2));
      static const char* known[] = {"scenario",  "coefficients", "params",   "jumps",
                                    "lipschitz", "manifold",     "numerics", "tolerances"};
      bool ok = false;
      for (const char* k : known) ok = ok || section == k;
      if (!ok)
        throw ScenarioError("line " + std::to_string(line_no) + ": unknown section [" + section +
                                "]",
                            line_no);
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ScenarioError("line " + std::to_string(line_no) + ": expected 'key = value'",
                          line_no);
    if (section.empty())
      throw ScenarioError("line " + std::to_string(line_no) + ": key outside any section",
                          line_no);
    Line ln;
    ln.number = line_no;
    ln.section = section;
    ln.key = trim(t.substr(0, eq));
    ln.values = split_values(t.substr(eq + 1), line_no, &ln.quoted);
    if (ln.key.empty())
      throw ScenarioError("line " + std::to_string(line_no) + ": empty key", line_no);
    lines.push_back(std::move(ln));
  }

  auto one = [](const Line& ln) -> const std::string& {
    if (ln.values.size() != 1)
      throw ScenarioError("line " + std::to_string(ln.number) + ": key '" + ln.key +
                              "' takes a single value",
                          ln.number);
    return ln.values[0];
  };

  for (const Line& ln : lines) {
    const int n = ln.number;
    if (ln.section == "scenario") {
      if (ln.key == "name") s.name = one(ln);
      else if (ln.key == "manifold") s.manifold_kind = one(ln);
      else if (ln.key == "m") s.m = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "d") s.d = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "l") s.l = static_cast<int>(parse_int(one(ln), n));
      else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [scenario]",
                            n);
    } else if (ln.section == "coefficients") {
      int idx = 0;
      if (ln.key == "builtin") s.builtin = builtin_from_name(one(ln));
      else if (ln.key == "beta") s.beta = parse_number(one(ln), n);
      else if (ln.key == "lambda") s.lambda = parse_number(one(ln), n);
      else if (ln.key == "drift") s.drift_exprs = ln.values;
      else if (ln.key == "jump") s.jump_exprs = ln.values;
      else if (is_sigma_key(ln.key, &idx)) {
        if (static_cast<int>(s.sigma_exprs.size()) < idx) s.sigma_exprs.resize(idx);
        s.sigma_exprs[idx - 1] = ln.values;
      } else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [coefficients]",
                            n);
    } else if (ln.section == "params") {
      s.params[ln.key] = parse_number(one(ln), n);
    } else if (ln.section == "jumps") {
      if (ln.key == "mark") {
        if (ln.values.size() < 2)
          throw ScenarioError("line " + std::to_string(n) +
                                  ": mark needs 'weight, e1, ..., el'",
                              n);
        Mark mk;
        mk.weight = parse_number(ln.values[0], n);
        if (mk.weight <= 0.0)
          throw ScenarioError("line " + std::to_string(n) + ": mark weight must be positive", n);
        for (std::size_t i = 1; i < ln.values.size(); ++i)
          mk.point.push_back(parse_number(ln.values[i], n));
        s.marks.push_back(std::move(mk));
      } else if (ln.key == "rho") {
        s.rho_expr = one(ln);
      } else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [jumps]",
                            n);
    } else if (ln.section == "lipschitz") {
      if (ln.key == "mu") s.mu = parse_number(one(ln), n);
      else if (ln.key == "C") s.lipschitz_C = parse_number(one(ln), n);
      else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [lipschitz]",
                            n);
    } else if (ln.section == "manifold") {
      if (ln.key == "constraint") s.constraint_exprs = ln.values;
      else if (ln.key == "tube_radius") s.tube_radius = parse_number(one(ln), n);
      else if (ln.key == "sample_scale") s.sample_scale = parse_number(one(ln), n);
      else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [manifold]",
                            n);
    } else if (ln.section == "numerics") {
      if (ln.key == "t0") s.t0 = parse_number(one(ln), n);
      else if (ln.key == "horizon") s.horizon = parse_number(one(ln), n);
      else if (ln.key == "n_steps") s.n_steps = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "n_paths") s.n_paths = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "sample_count") s.sample_count = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "time_samples") s.time_samples = static_cast<int>(parse_int(one(ln), n));
      else if (ln.key == "tube_radius") s.tube_radius = parse_number(one(ln), n);
      else if (ln.key == "seed") s.seed = parse_u64(one(ln), n);
      else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [numerics]",
                            n);
    } else if (ln.section == "tolerances") {
      if (ln.key == "drift") s.tol_drift = parse_number(one(ln), n);
      else if (ln.key == "tangency") s.tol_tangency = parse_number(one(ln), n);
      else if (ln.key == "jump") s.tol_jump = parse_number(one(ln), n);
      else if (ln.key == "slack") s.tol_slack = parse_number(one(ln), n);
      else
        throw ScenarioError("line " + std::to_string(n) + ": unknown key '" + ln.key +
                                "' in [tolerances]",
                            n);
    }
  }

  // ---- structural validation ----
  if (s.builtin) {
    if (s.m == 0) s.m = 3;
    if (s.d == 0) s.d = 1;
    if (s.m != 3 || s.d != 1)
      throw ScenarioError("builtin scenarios require m = 3, d = 1");
    if (*s.builtin == BuiltinId::Ex35) {
      if (s.l == 0) s.l = 1;
      if (s.lambda <= 0.0) throw ScenarioError("ex35 requires lambda > 0");
    }
    if (!s.drift_exprs.empty() || !s.sigma_exprs.empty() || !s.jump_exprs.empty())
      throw ScenarioError("builtin scenarios must not define coefficient expressions");
    if (!s.marks.empty() || !s.rho_expr.empty())
      throw ScenarioError("builtin scenarios own their jump measure; drop the [jumps] section");
  } else {
    if (s.m <= 0) throw ScenarioError("m must be declared for expression-defined coefficients");
    if (s.d < 0) throw ScenarioError("d must be >= 0");
    if (static_cast<int>(s.drift_exprs.size()) != s.m)
      throw ScenarioError("drift needs exactly m = " + std::to_string(s.m) + " components");
    if (static_cast<int>(s.sigma_exprs.size()) != s.d)
      throw ScenarioError("need exactly d = " + std::to_string(s.d) + " sigma columns");
    for (const auto& col : s.sigma_exprs)
      if (static_cast<int>(col.size()) != s.m)
        throw ScenarioError("each sigma column needs m components");
    if (!s.jump_exprs.empty() && static_cast<int>(s.jump_exprs.size()) != s.m)
      throw ScenarioError("jump needs exactly m components");
  }
  if (!s.marks.empty()) {
    if (!s.builtin && s.jump_exprs.empty())
      throw ScenarioError("marks declared but no jump coefficient");
    for (const Mark& mk : s.marks)
      if (static_cast<int>(mk.point.size()) != s.l)
        throw ScenarioError("mark dimension differs from declared l = " + std::to_string(s.l));
  }
  if (!s.rho_expr.empty() && s.marks.empty() && !s.builtin)
    throw ScenarioError("rho declared but the jump list is empty");
  if (!s.jump_exprs.empty() && s.marks.empty())
    throw ScenarioError("jump coefficient declared but no marks");
  if (s.manifold_kind != "sphere" && s.manifold_kind != "circle" && s.manifold_kind != "torus" &&
      s.manifold_kind != "implicit")
    throw ScenarioError("unknown manifold '" + s.manifold_kind + "'");
  if (s.manifold_kind == "implicit" && s.constraint_exprs.empty())
    throw ScenarioError("implicit manifold needs a constraint");
  if (s.manifold_kind != "implicit" && !s.constraint_exprs.empty())
    throw ScenarioError("constraint only applies to manifold = implicit");
  if (s.horizon < s.t0) throw ScenarioError("horizon must be >= t0");
  if (s.n_steps < 1 || s.n_paths < 1 || s.sample_count < 1 || s.time_samples < 1)
    throw ScenarioError("numerics counts must be >= 1");
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str(), path);
}

namespace {

ImplicitManifold manifold_from(const Scenario& s) {
  ImplicitManifold M;
  if (s.manifold_kind == "sphere") M = make_sphere();
  else if (s.manifold_kind == "circle") M = make_circle();
  else if (s.manifold_kind == "torus") M = make_torus();
  else {
    // implicit manifold with expression-defined constraint
    dsl::Dims dims;
    dims.state = s.m;
    dims.mark = 0;
    auto F = dsl::compile_field(s.constraint_exprs, dims, s.params);
    const int m = s.m;
    const int k = static_cast<int>(s.constraint_exprs.size());
    M.name = "implicit";
    M.ambient_dim = m;
    M.codim = k;
    M.constraint = [F](const Vec& x) { return F(0.0, x); };
    M.constraint_jacobian = [F, m, k](const Vec& x) {
      const double h = 1e-6;
      Mat j(k, m);
      for (int c = 0; c < m; ++c) {
        Vec xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        Vec fp = F(0.0, xp), fm = F(0.0, xm);
        for (int r = 0; r < k; ++r) j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
      }
      return j;
    };
    M.tube_radius = 0.1;
    M.sample_scale = s.sample_scale;
  }
  if (static_cast<int>(M.ambient_dim) != s.m && s.m != 0 && !s.builtin)
    throw ScenarioError("declared m = " + std::to_string(s.m) + " does not match manifold '" +
                        s.manifold_kind + "'");
  if (s.tube_radius) {
    if (*s.tube_radius <= 0.0) throw ScenarioError("tube_radius must be positive");
    M.tube_radius = *s.tube_radius;
  }
  return M;
}

}  // namespace

ScenarioRuntime build_runtime(const Scenario& s) {
  ScenarioRuntime rt;

  if (s.builtin) {
    auto b = make_builtin(*s.builtin, s.beta, s.lambda, s.t0, s.horizon);
    rt.coefficients = b.coefficients;
    rt.jumps = b.jumps;
    rt.problem = b.problem;
    rt.oracle = b.oracle;
    rt.mu = s.mu.value_or(b.lipschitz.mu);
    rt.rho_sq_integral = b.lipschitz.rho_sq_integral;
    rt.C = s.lipschitz_C.value_or(LipschitzData::bound(rt.mu, rt.rho_sq_integral));
  } else {
    dsl::Dims dims;
    dims.state = s.m;
    dims.mark = s.l;

    CoefficientSet c;
    c.dim_state = s.m;
    c.dim_noise = s.d;
    auto drift = dsl::compile_field(s.drift_exprs, dims, s.params);
    c.drift = [drift](double t, const Vec& x) { return drift(t, x); };
    for (const auto& col_exprs : s.sigma_exprs) {
      auto col = dsl::compile_field(col_exprs, dims, s.params);
      c.diffusion_columns.push_back([col](double t, const Vec& x) { return col(t, x); });
    }
    if (!s.jump_exprs.empty()) {
      auto gamma = dsl::compile_field(s.jump_exprs, dims, s.params);
      c.jump = [gamma](double t, const Vec& x, const Vec& e) { return gamma(t, x, e); };
    }
    rt.coefficients = std::move(c);
    rt.jumps.marks = s.marks;

    SDEProblem p;
    p.coefficients = rt.coefficients;
    p.jumps = rt.jumps;
    p.t0 = s.t0;
    p.horizon = s.horizon;
    // start at the first manifold sample so pathwise statistics begin on K
    p.x0 = Vec(s.m, 0.0);
    rt.problem = std::move(p);

    // rho^2 integral over the declared marks
    if (!s.rho_expr.empty()) {
      dsl::Dims rho_dims;
      rho_dims.state = 0;
      rho_dims.mark = s.l;
      auto rho = dsl::compile_field({s.rho_expr}, rho_dims, s.params);
      double acc = 0.0;
      for (const Mark& mk : s.marks) {
        Vec empty_x;
        double rv = rho(0.0, empty_x, mk.point)[0];
        if (rv < 0.0) throw ScenarioError("rho must be nonnegative");
        acc += rv * rv * mk.weight;
      }
      rt.rho_sq_integral = acc;
    } else if (!s.marks.empty()) {
      throw ScenarioError("scenarios with jumps must declare rho");
    }

    if (s.mu) {
      rt.mu = *s.mu;
    } else {
      // never silent: callers print the estimate in their reports
      rt.mu = 1.25 * max_lipschitz_quotient(rt.coefficients, s.t0, 2.0, 2000,
                                            derive_seed(s.seed, 0xACED));
      rt.mu_estimated = true;
    }
    rt.C = s.lipschitz_C.value_or(LipschitzData::bound(rt.mu, rt.rho_sq_integral));
  }

  rt.manifold = manifold_from(s);

  if (!s.builtin) {
    auto start = sample_manifold(rt.manifold, 1, derive_seed(s.seed, 0x0B00));
    rt.problem.x0 = start[0];
  }

  // validate the C bound like LipschitzData does
  LipschitzData check(rt.mu, rt.rho_sq_integral, rt.C);
  (void)check;
  rt.problem.validate();
  return rt;
}

}  // namespace viab
