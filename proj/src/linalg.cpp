#include "viab/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace viab {

Vec matvec(const Mat& m, const Vec& x) {
  Vec y(m.rows, 0.0);
  for (int i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vec matvec_t(const Mat& m, const Vec& x) {
  Vec y(m.cols, 0.0);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) y[j] += m(i, j) * x[i];
  return y;
}

Mat matmul_nt(const Mat& a, const Mat& b) {
  Mat c(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j) {
      double s = 0.0;
      for (int k = 0; k < a.cols; ++k) s += a(i, k) * b(j, k);
      c(i, j) = s;
    }
  return c;
}

Vec solve_dense(Mat a, Vec b) {
  const int n = a.rows;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(a(col, col));
    for (int r = col + 1; r < n; ++r) {
      double v = std::abs(a(r, col));
      if (v > best) {
        best = v;
        pivot = r;
      }
    }
    if (best < 1e-300) throw GeometryError("singular linear system");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(a(col, j), a(pivot, j));
      std::swap(b[col], b[pivot]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

std::vector<double> symmetric_eigenvalues(Mat s) {
  const int n = s.rows;
  // Cyclic Jacobi; plenty for n <= 8.
  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += s(p, q) * s(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        double apq = s(p, q);
        if (std::abs(apq) < 1e-300) continue;
        double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
        double t = (theta >= 0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double sn = t * c;
        for (int k = 0; k < n; ++k) {
          double skp = s(k, p), skq = s(k, q);
          s(k, p) = c * skp - sn * skq;
          s(k, q) = sn * skp + c * skq;
        }
        for (int k = 0; k < n; ++k) {
          double spk = s(p, k), sqk = s(q, k);
          s(p, k) = c * spk - sn * sqk;
          s(q, k) = sn * spk + c * sqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = s(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

double min_singular_value(const Mat& j) {
  Mat g = matmul_nt(j, j);  // j j^T, k x k
  auto ev = symmetric_eigenvalues(g);
  double lo = std::max(ev.front(), 0.0);
  return std::sqrt(lo);
}

std::vector<Vec> orthonormal_rows(const Mat& j, double rank_tol) {
  std::vector<Vec> rows;
  rows.reserve(j.rows);
  for (int i = 0; i < j.rows; ++i) {
    Vec v(j.cols);
    for (int c = 0; c < j.cols; ++c) v[c] = j(i, c);
    for (const Vec& u : rows) axpy(-dot(u, v), u, v);
    // second pass for numerical orthogonality
    for (const Vec& u : rows) axpy(-dot(u, v), u, v);
    double n = norm(v);
    if (n < rank_tol) throw GeometryError("constraint Jacobian is rank deficient");
    for (double& c : v) c /= n;
    rows.push_back(std::move(v));
  }
  return rows;
}

}  // namespace viab
