#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "viab/builtin.hpp"
#include "viab/rng.hpp"
#include "viab/viability.hpp"

using namespace viab;

namespace {

Vec random_sphere_point(std::mt19937_64& eng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec u{gauss(eng), gauss(eng), gauss(eng)};
  return (1.0 / norm(u)) * u;
}

}  // namespace

TEST_CASE("directional derivative of a constant column is zero") {
  CoefficientSet c;
  c.dim_state = 3;
  c.dim_noise = 1;
  c.drift = [](double, const Vec&) { return Vec{0, 0, 0}; };
  c.diffusion_columns = {[](double, const Vec&) { return Vec{1.0, 2.0, 3.0}; }};
  Vec d = directional_derivative_sigma(c, 0, 0.0, {0.4, 0.5, 0.6});
  CHECK(norm(d) <= 1e-9);
}

TEST_CASE("ex33 bracket <D sigma, sigma> = (0, -x2, -x3)") {
  auto b = make_builtin(BuiltinId::Ex33, 0.7);
  std::mt19937_64 eng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    Vec x{u(eng), u(eng), u(eng)};
    double t = u(eng);
    Vec analytic = directional_derivative_sigma(b.coefficients, 0, t, x, true);
    CHECK(analytic[0] == 0.0);
    CHECK(analytic[1] == -x[1]);
    CHECK(analytic[2] == -x[2]);
    Vec fd = directional_derivative_sigma(b.coefficients, 0, t, x, false);
    for (int j = 0; j < 3; ++j) CHECK(std::abs(analytic[j] - fd[j]) <= 1e-6);
  }
}

TEST_CASE("ex33 residuals vanish pointwise") {
  auto b = make_builtin(BuiltinId::Ex33, 0.7);
  auto M = make_sphere();
  Vec xbar{std::cos(0.7), std::sin(0.7), 0.0};
  auto r = check_point(b.coefficients, b.jumps, M, 0.3, xbar);
  REQUIRE(r.drift_residuals.size() == 1);
  CHECK(std::abs(r.drift_residuals[0]) <= 1e-12);
  CHECK(std::abs(r.tangency_residuals[0][0]) <= 1e-12);
  CHECK(r.jump_residuals.empty());
}

TEST_CASE("ex34 drift residual is -2 at the equator") {
  auto b = make_builtin(BuiltinId::Ex34, M_PI / 2);
  auto M = make_sphere();
  auto r = check_point(b.coefficients, b.jumps, M, 0.0, {0.0, 1.0, 0.0});
  CHECK(r.drift_residuals[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(r.tangency_residuals[0][0]) <= 1e-12);
}

TEST_CASE("ex35 residuals vanish and jumps land on K") {
  for (double lambda : {0.5, 1.0, 4.0}) {
    auto b = make_builtin(BuiltinId::Ex35, 1.0, lambda);
    auto M = make_sphere();
    std::mt19937_64 eng(17);
    for (int i = 0; i < 50; ++i) {
      Vec xbar = random_sphere_point(eng);
      auto r = check_point(b.coefficients, b.jumps, M, 0.1 * i, xbar);
      CHECK(std::abs(r.drift_residuals[0]) <= 1e-12);
      REQUIRE(r.jump_residuals.size() == 1);
      CHECK(r.jump_residuals[0] <= 1e-12);
    }
  }
}

TEST_CASE("general form (2.1) agrees with the sphere form (3.1)") {
  auto M = make_sphere();
  std::mt19937_64 eng(21);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  for (auto [id, lambda] : {std::pair{BuiltinId::Ex33, 0.0}, {BuiltinId::Ex34, 0.0},
                            {BuiltinId::Ex35, 1.5}}) {
    auto b = make_builtin(id, 0.8, lambda);
    for (int i = 0; i < 1000; ++i) {
      Vec xbar = random_sphere_point(eng);
      double t = ut(eng);
      auto r = check_point(b.coefficients, b.jumps, M, t, xbar);
      double sphere = sphere_form_drift_residual(b.coefficients, b.jumps, t, xbar);
      CHECK(std::abs(r.drift_residuals[0] - sphere) <= 1e-10);
    }
  }
}

TEST_CASE("residuals scale linearly in the normal vector") {
  auto b = make_builtin(BuiltinId::Ex34, 1.2);
  auto M = make_sphere();
  std::mt19937_64 eng(31);
  Vec xbar = random_sphere_point(eng);
  auto base = check_point_with_normals(b.coefficients, b.jumps, M, 0.0, xbar, {xbar});
  for (double c : {2.0, -1.0, 0.25}) {
    auto scaled = check_point_with_normals(b.coefficients, b.jumps, M, 0.0, xbar, {c * xbar});
    CHECK(scaled.drift_residuals[0] ==
          doctest::Approx(c * base.drift_residuals[0]).epsilon(1e-12));
    CHECK(scaled.tangency_residuals[0][0] ==
          doctest::Approx(c * base.tangency_residuals[0][0]).epsilon(1e-12));
  }
}

TEST_CASE("drift residual equals its Stratonovich form") {
  auto M = make_sphere();
  std::mt19937_64 eng(57);
  for (auto [id, lambda] : {std::pair{BuiltinId::Ex33, 0.0}, {BuiltinId::Ex34, 0.0},
                            {BuiltinId::Ex35, 2.0}}) {
    auto b = make_builtin(id, 0.6, lambda);
    for (int i = 0; i < 100; ++i) {
      Vec xbar = random_sphere_point(eng);
      auto r = check_point(b.coefficients, b.jumps, M, 0.2, xbar);
      Vec bs = ito_to_stratonovich_drift(b.coefficients, 0.2, xbar);
      double via_strat = 2.0 * dot(bs, xbar);
      for (const Mark& mk : b.jumps.marks)
        via_strat -= 2.0 * dot(b.coefficients.jump(0.2, xbar, mk.point), xbar) * mk.weight;
      CHECK(std::abs(r.drift_residuals[0] - via_strat) <= 1e-8);
    }
  }
}

TEST_CASE("check_manifold: ex33 passes with analytic derivatives") {
  auto b = make_builtin(BuiltinId::Ex33, 0.7);
  auto M = make_sphere();
  Vec times{0.0, 0.25, 0.5, 0.75, 1.0};
  auto rep = check_manifold(b.coefficients, b.jumps, M, times, 200,
                            CheckerTolerances::analytic_profile(), 51);
  CHECK(rep.pass);
  CHECK(rep.max_drift <= 1e-9);
  CHECK(rep.max_tangency <= 1e-9);
}

TEST_CASE("check_manifold: ex33 passes in finite-difference mode") {
  auto b = make_builtin(BuiltinId::Ex33, 0.7);
  auto M = make_sphere();
  auto rep = check_manifold(b.coefficients, b.jumps, M, {0.0, 0.5, 1.0}, 100,
                            CheckerTolerances::fd_profile(), 52);
  CHECK(rep.pass);
  CHECK(rep.max_drift <= 1e-4);
}

TEST_CASE("check_manifold: ex34 fails near the equator with residual -2 sin^2") {
  auto b = make_builtin(BuiltinId::Ex34, M_PI / 2);
  auto M = make_sphere();
  Vec times{0.0, 0.5, 1.0};
  auto rep = check_manifold(b.coefficients, b.jumps, M, times, 500,
                            CheckerTolerances::analytic_profile(), 53);
  CHECK(!rep.pass);
  CHECK(rep.max_drift >= 1.9);
  CHECK(std::abs(rep.worst_point[0]) <= 0.15);  // equator: x1 ~ 0
  for (const auto& s : rep.samples) {
    double sin2 = s.point[1] * s.point[1] + s.point[2] * s.point[2];
    CHECK(std::abs(s.drift_residuals[0] - (-2.0 * sin2)) <= 1e-9);
  }
}

TEST_CASE("check_manifold: zero coefficients pass on the torus") {
  CoefficientSet c;
  c.dim_state = 3;
  c.dim_noise = 1;
  c.drift = [](double, const Vec&) { return Vec{0, 0, 0}; };
  c.diffusion_columns = {[](double, const Vec&) { return Vec{0, 0, 0}; }};
  auto M = make_torus();
  auto rep = check_manifold(c, {}, M, {0.0}, 100, CheckerTolerances::fd_profile(), 54);
  CHECK(rep.pass);
  CHECK(rep.max_drift == 0.0);
}

TEST_CASE("check_manifold is deterministic and thread-count independent") {
  auto b = make_builtin(BuiltinId::Ex34, 0.9);
  auto M = make_sphere();
  Vec times{0.0, 0.5};
  auto r1 = check_manifold(b.coefficients, b.jumps, M, times, 100,
                           CheckerTolerances::analytic_profile(), 55, 1);
  auto r2 = check_manifold(b.coefficients, b.jumps, M, times, 100,
                           CheckerTolerances::analytic_profile(), 55, 2);
  CHECK(r1.max_drift == r2.max_drift);
  CHECK(r1.worst_point == r2.worst_point);
}
