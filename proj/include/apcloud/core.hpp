#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace apc {

// Point in 2 or 3 dimensions. The z component is unused (zero) in 2D.
using Vec = std::array<double, 3>;

inline Vec vec2(double x, double y) { return {x, y, 0.0}; }
inline Vec vec3(double x, double y, double z) { return {x, y, z}; }

inline Vec operator-(const Vec& a, const Vec& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator+(const Vec& a, const Vec& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Vec& a, const Vec& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Axis-aligned box domain.
struct Domain {
  int dim = 2;
  Vec lo{-1.0, -1.0, -1.0};
  Vec hi{1.0, 1.0, 1.0};

  static Domain unit_box(int dim) {
    Domain d;
    d.dim = dim;
    for (int k = 0; k < 3; ++k) {
      d.lo[k] = (k < dim) ? -1.0 : 0.0;
      d.hi[k] = (k < dim) ? 1.0 : 0.0;
    }
    return d;
  }

  double edge(int d) const { return hi[d] - lo[d]; }

  bool contains(const Vec& p) const {
    for (int d = 0; d < dim; ++d)
      if (p[d] < lo[d] || p[d] > hi[d]) return false;
    return true;
  }
};

// Sampled macro-particle. All particles of one sample carry charge 1/N.
struct Particle {
  Vec pos{0, 0, 0};
  double charge = 0.0;
};

// --- Error types -----------------------------------------------------------

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

// Morton key width exceeded.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class EmptyTreeError : public Error {
 public:
  using Error::Error;
};

// Node selection demanded a level beyond the tree's maximum depth.
class DepthExhaustedError : public Error {
 public:
  using Error::Error;
};

class StencilStarvationError : public Error {
 public:
  using Error::Error;
};

class DegenerateStencilError : public Error {
 public:
  using Error::Error;
};

class IllConditionedStencilError : public Error {
 public:
  using Error::Error;
};

class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace apc
