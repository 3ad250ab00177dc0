#ifndef VIAB_COMMON_HPP
#define VIAB_COMMON_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace viab {

using Vec = std::vector<double>;

// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Evaluation left the domain of an expression or formula (1/0, sqrt(-1), overflow).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Manifold geometry failure: rank deficiency, sampler starvation, bad inputs.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Newton projection did not converge, or the target lies outside the tube.
class ProjectionError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// Equidistant (medial-axis) point: the nearest point on K is not unique.
class AmbiguityError : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

// A coefficient evaluated to a non-finite value during time stepping.
class SimulationError : public Error {
 public:
  SimulationError(const std::string& msg, double t, Vec x, long step = -1)
      : Error(msg), time(t), state(std::move(x)), step_index(step) {}
  double time;
  Vec state;
  long step_index;
};

inline bool all_finite(const Vec& v) {
  for (double a : v) {
    if (!std::isfinite(a)) return false;
  }
  return true;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(double c, Vec a) {
  for (double& v : a) v *= c;
  return a;
}

// a += c*b
inline void axpy(double c, const Vec& b, Vec& a) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += c * b[i];
}

// Neumaier compensated accumulator; montecarlo merges means with this so the
// result does not depend on how path batches were split across threads.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace viab

#endif  // VIAB_COMMON_HPP
