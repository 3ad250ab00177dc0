#ifndef VIAB_MANIFOLD_HPP
#define VIAB_MANIFOLD_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "viab/common.hpp"
#include "viab/linalg.hpp"

// Geometry of a closed submanifold K = {F = 0} of R^m: nearest-point
// projection, squared distance d_K^2 with derivatives, normal-space bases,
// and samplers for K and its tubular neighborhood.

namespace viab {

struct ImplicitManifold {
  std::string name;
  int ambient_dim = 0;  // m
  int codim = 0;        // k

  std::function<Vec(const Vec&)> constraint;           // F: R^m -> R^k
  std::function<Mat(const Vec&)> constraint_jacobian;  // k x m, rows grad F_i

  // Radius of the neighborhood where d_K^2 is treated as smooth and the
  // projection as unique. Default 0.2 * (reach estimate) for the builtins.
  double tube_radius = 0.2;

  // Analytic overrides; null for the general Newton path. The overrides may
  // cover all of R^m minus a singular set (sphere: the center).
  std::function<Vec(const Vec&)> project_override;
  std::function<double(const Vec&)> dist2_override;
  std::function<Vec(const Vec&)> grad_dist2_override;
  std::function<Mat(const Vec&)> hess_dist2_override;

  double proj_tol = 1e-10;
  double on_manifold_tol = 1e-9;
  double hess_fd_step = 1e-4;
  double rank_tol = 1e-8;
  int max_newton_iter = 60;

  // Ambient Gaussian scale for rejection sampling.
  double sample_scale = 1.0;

  bool has_analytic() const { return static_cast<bool>(project_override); }
};

struct NormalBasis {
  Vec base_point;
  std::vector<Vec> vectors;  // k orthonormal normal directions
};

// Nearest point of K. The general path runs Newton on the Lagrange system
// b = a + J(b)^T eta, F(b) = 0 and enforces the tube precondition post hoc.
Vec project(const ImplicitManifold& M, const Vec& a);

double dist2(const ImplicitManifold& M, const Vec& x);
Vec grad_dist2(const ImplicitManifold& M, const Vec& x);      // 2 (x - project(x))
Mat hess_dist2(const ImplicitManifold& M, const Vec& x);      // symmetric m x m

NormalBasis normal_basis(const ImplicitManifold& M, const Vec& xbar);

std::vector<Vec> sample_manifold(const ImplicitManifold& M, int count, std::uint64_t seed);

// Points xbar + s n with xbar on K, n a unit normal, 0 < |s| <= radius.
std::vector<Vec> sample_tube(const ImplicitManifold& M, int count, double radius,
                             std::uint64_t seed);

ImplicitManifold make_sphere();                            // S^2 in R^3, analytic overrides
ImplicitManifold make_circle();                            // S^1 in R^2, analytic overrides
ImplicitManifold make_torus(double R = 2.0, double r = 0.5);  // implicit only
// The unit sphere without overrides; exercises the general Newton machinery.
ImplicitManifold make_sphere_implicit();

}  // namespace viab

#endif  // VIAB_MANIFOLD_HPP
