#ifndef VIAB_LINALG_HPP
#define VIAB_LINALG_HPP

#include <vector>

#include "viab/common.hpp"

// Dense helpers for the small matrices this project needs (state dimension m
// and codimension k are single digits everywhere).

namespace viab {

// Row-major dense matrix.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

Vec matvec(const Mat& m, const Vec& x);
Vec matvec_t(const Mat& m, const Vec& x);  // m^T x
Mat matmul_nt(const Mat& a, const Mat& b); // a * b^T

// Solves a x = b in place by Gaussian elimination with partial pivoting.
// Throws GeometryError on a (numerically) singular matrix.
Vec solve_dense(Mat a, Vec b);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(Mat s);

// Smallest singular value of a rectangular matrix (k x m, k <= m).
double min_singular_value(const Mat& j);

// Orthonormalizes the rows of j (modified Gram-Schmidt). Rows whose residual
// norm falls below rank_tol signal rank deficiency: throws GeometryError.
std::vector<Vec> orthonormal_rows(const Mat& j, double rank_tol);

}  // namespace viab

#endif  // VIAB_LINALG_HPP
