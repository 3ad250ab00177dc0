#include "viab/manifold.hpp"

#include <cmath>

#include "viab/rng.hpp"

namespace viab {

namespace {

constexpr double kCenterTol = 1e-8;

Vec newton_project(const ImplicitManifold& M, const Vec& a) {
  // Iterates b <- a + J(b)^T eta with eta from the k x k system
  // (J J^T) eta = -(F(b) + J (a - b)), i.e. a Lagrange-Newton step with the
  // curvature of F frozen. Quadratic convergence inside the tube.
  Vec b = a;
  const int k = M.codim;
  for (int it = 0; it < M.max_newton_iter; ++it) {
    Vec f = M.constraint(b);
    if (!all_finite(f)) throw ProjectionError("constraint evaluated non-finite");
    Mat jac = M.constraint_jacobian(b);
    Vec rhs(k);
    Vec amb = a - b;
    for (int i = 0; i < k; ++i) {
      double ja = 0.0;
      for (int c = 0; c < M.ambient_dim; ++c) ja += jac(i, c) * amb[c];
      rhs[i] = -(f[i] + ja);
    }
    Mat gram = matmul_nt(jac, jac);
    Vec eta;
    try {
      eta = solve_dense(gram, rhs);
    } catch (const GeometryError&) {
      throw ProjectionError("projection Newton hit a singular normal system");
    }
    Vec next = a;
    for (int i = 0; i < k; ++i)
      for (int c = 0; c < M.ambient_dim; ++c) next[c] += jac(i, c) * eta[i];
    double step = norm(next - b);
    b = std::move(next);
    if (step < 1e-14 && norm(M.constraint(b)) <= M.proj_tol) return b;
  }
  if (norm(M.constraint(b)) <= M.proj_tol) return b;
  throw ProjectionError("projection did not converge");
}

}  // namespace

Vec project(const ImplicitManifold& M, const Vec& a) {
  if (M.project_override) return M.project_override(a);
  Vec b = newton_project(M, a);
  double d = norm(a - b);
  if (d > M.tube_radius * (1.0 + 1e-9))
    throw ProjectionError("point outside the tubular neighborhood");
  return b;
}

double dist2(const ImplicitManifold& M, const Vec& x) {
  if (M.dist2_override) return M.dist2_override(x);
  Vec b = project(M, x);
  Vec r = x - b;
  return dot(r, r);
}

Vec grad_dist2(const ImplicitManifold& M, const Vec& x) {
  if (M.grad_dist2_override) return M.grad_dist2_override(x);
  Vec b = project(M, x);
  return 2.0 * (x - b);
}

Mat hess_dist2(const ImplicitManifold& M, const Vec& x) {
  if (M.hess_dist2_override) return M.hess_dist2_override(x);
  const int m = M.ambient_dim;
  const double h = M.hess_fd_step;
  Mat H(m, m);
  for (int j = 0; j < m; ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Vec gp = grad_dist2(M, xp);
    Vec gm = grad_dist2(M, xm);
    for (int i = 0; i < m; ++i) H(i, j) = (gp[i] - gm[i]) / (2.0 * h);
  }
  // symmetrize
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      double v = 0.5 * (H(i, j) + H(j, i));
      H(i, j) = v;
      H(j, i) = v;
    }
  return H;
}

NormalBasis normal_basis(const ImplicitManifold& M, const Vec& xbar) {
  Vec f = M.constraint(xbar);
  if (norm(f) > M.on_manifold_tol) throw GeometryError("normal_basis: point not on K");
  Mat jac = M.constraint_jacobian(xbar);
  NormalBasis nb;
  nb.base_point = xbar;
  nb.vectors = orthonormal_rows(jac, M.rank_tol);
  return nb;
}

std::vector<Vec> sample_manifold(const ImplicitManifold& M, int count, std::uint64_t seed) {
  auto eng = make_engine(derive_seed(seed, stream::kManifold));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  const int m = M.ambient_dim;
  long tries = 0;
  const long max_tries = 200L * count + 1000;
  while (static_cast<int>(out.size()) < count) {
    if (++tries > max_tries) throw GeometryError("manifold sampler starved");
    Vec g(m);
    for (int i = 0; i < m; ++i) g[i] = M.sample_scale * gauss(eng);
    try {
      Vec b = M.project_override ? M.project_override(g) : newton_project(M, g);
      if (norm(M.constraint(b)) <= M.on_manifold_tol) out.push_back(std::move(b));
    } catch (const GeometryError&) {
      // rejected draw
    }
  }
  return out;
}

std::vector<Vec> sample_tube(const ImplicitManifold& M, int count, double radius,
                             std::uint64_t seed) {
  if (radius <= 0.0) throw GeometryError("sample_tube: radius must be positive");
  if (radius > M.tube_radius * (1.0 + 1e-12))
    throw GeometryError("sample_tube: radius exceeds tube_radius");
  auto base = sample_manifold(M, count, seed);
  auto eng = make_engine(derive_seed(seed, stream::kTube));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> out;
  out.reserve(count);
  for (const Vec& xbar : base) {
    NormalBasis nb = normal_basis(M, xbar);
    Vec n(M.ambient_dim, 0.0);
    if (nb.vectors.size() == 1) {
      n = nb.vectors[0];
    } else {
      for (const Vec& v : nb.vectors) axpy(gauss(eng), v, n);
      double ln = norm(n);
      if (ln < 1e-12) {
        n = nb.vectors[0];
      } else {
        for (double& c : n) c /= ln;
      }
    }
    double s = radius * u01(eng);
    if (s == 0.0) s = 0.5 * radius;
    if (u01(eng) < 0.5) s = -s;
    Vec x = xbar;
    axpy(s, n, x);
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

// Shared radial formulas for the unit sphere S^{m-1}: d^2 = (|x|-1)^2.
ImplicitManifold make_round(int m, const char* name) {
  ImplicitManifold M;
  M.name = name;
  M.ambient_dim = m;
  M.codim = 1;
  M.tube_radius = 0.2;  // 0.2 * reach, reach = 1
  M.sample_scale = 1.0;
  M.constraint = [](const Vec& x) { return Vec{dot(x, x) - 1.0}; };
  M.constraint_jacobian = [m](const Vec& x) {
    Mat j(1, m);
    for (int i = 0; i < m; ++i) j(0, i) = 2.0 * x[i];
    return j;
  };
  M.project_override = [](const Vec& x) {
    double r = norm(x);
    if (r < kCenterTol) throw AmbiguityError("projection ambiguous at the center");
    return (1.0 / r) * x;
  };
  M.dist2_override = [](const Vec& x) {
    double d = norm(x) - 1.0;
    return d * d;
  };
  M.grad_dist2_override = [](const Vec& x) {
    double r = norm(x);
    if (r < kCenterTol) throw AmbiguityError("gradient ambiguous at the center");
    return (2.0 * (1.0 - 1.0 / r)) * x;
  };
  M.hess_dist2_override = [m](const Vec& x) {
    double r = norm(x);
    if (r < kCenterTol) throw AmbiguityError("Hessian ambiguous at the center");
    // H = 2 u u^T + 2 (1 - 1/r)(I - u u^T)  with u = x / r
    Mat H(m, m);
    double c = 2.0 * (1.0 - 1.0 / r);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double uu = x[i] * x[j] / (r * r);
        H(i, j) = (i == j ? c : 0.0) + (2.0 - c) * uu;
      }
    }
    return H;
  };
  return M;
}

}  // namespace

ImplicitManifold make_sphere() { return make_round(3, "sphere"); }

ImplicitManifold make_circle() { return make_round(2, "circle"); }

ImplicitManifold make_sphere_implicit() {
  ImplicitManifold M = make_round(3, "sphere-implicit");
  M.project_override = nullptr;
  M.dist2_override = nullptr;
  M.grad_dist2_override = nullptr;
  M.hess_dist2_override = nullptr;
  return M;
}

ImplicitManifold make_torus(double R, double r) {
  ImplicitManifold M;
  M.name = "torus";
  M.ambient_dim = 3;
  M.codim = 1;
  M.tube_radius = 0.2 * r;  // reach = minor radius
  M.sample_scale = R + r;
  M.constraint = [R, r](const Vec& x) {
    double rho = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    double q = rho - R;
    return Vec{q * q + x[2] * x[2] - r * r};
  };
  M.constraint_jacobian = [R](const Vec& x) {
    double rho = std::sqrt(x[0] * x[0] + x[1] * x[1]);
    Mat j(1, 3);
    if (rho < 1e-12) {
      // on the axis the implicit function is not differentiable
      j(0, 0) = 0.0;
      j(0, 1) = 0.0;
    } else {
      double f = 2.0 * (rho - R) / rho;
      j(0, 0) = f * x[0];
      j(0, 1) = f * x[1];
    }
    j(0, 2) = 2.0 * x[2];
    return j;
  };
  return M;
}

}  // namespace viab
