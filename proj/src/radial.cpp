#include "apcloud/radial.hpp"

#include <algorithm>
#include <cmath>

namespace apc {

namespace {

// integral_0^r exp(-s^2/(2 tau^2)) s^{D-1} ds for one unit-amplitude component
double component_moment(double r, double tau, int dim) {
  const double t2 = tau * tau;
  const double e = std::exp(-r * r / (2.0 * t2));
  if (dim == 2) return t2 * (1.0 - e);
  return -t2 * r * e + t2 * tau * std::sqrt(M_PI / 2.0) * std::erf(r / (std::sqrt(2.0) * tau));
}

constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

}  // namespace

double radial_moment(double r, const BeamParams& params) {
  return params.a1 * (component_moment(r, params.tau1, params.dim) +
                      params.a2 * component_moment(r, params.tau2, params.dim));
}

double RadialReference::dphi_at(double r) const {
  if (r <= 0.0) return 0.0;
  return radial_moment(r, params) / std::pow(r, dim - 1);
}

double RadialReference::phi_at(double r) const {
  if (r < 0.0 || r > r_max()) throw OutOfDomainError("radial reference: radius out of range");
  // cubic Lagrange on the 4 table points around r
  const auto it = std::upper_bound(radii.begin(), radii.end(), r);
  int j = static_cast<int>(it - radii.begin()) - 1;
  int lo = std::clamp(j - 1, 0, static_cast<int>(radii.size()) - 4);
  double v = 0.0;
  for (int a = 0; a < 4; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      l *= (r - radii[lo + b]) / (radii[lo + a] - radii[lo + b]);
    }
    v += l * phi[lo + a];
  }
  return v;
}

RadialReference radial_reference_solve(const BeamParams& params, int dim, int points) {
  if (points < 10000) throw ConfigError("radial reference: too few table points");
  BeamParams p = params;
  p.dim = dim;
  p.validate();

  RadialReference ref;
  ref.dim = dim;
  ref.params = p;
  ref.radii.resize(points);
  for (int i = 0; i < points; ++i) {
    const double s = static_cast<double>(i) / (points - 1);
    ref.radii[i] = 2.0 * s * s;  // graded toward r = 0
  }

  auto dphi = [&](double r) {
    return r <= 0.0 ? 0.0 : radial_moment(r, p) / std::pow(r, dim - 1);
  };

  ref.dphi.resize(points);
  for (int i = 0; i < points; ++i) ref.dphi[i] = dphi(ref.radii[i]);

  // phi(r) = -integral_r^2 phi', accumulated backward per table interval
  ref.phi.assign(points, 0.0);
  for (int i = points - 2; i >= 0; --i) {
    const double a = ref.radii[i], b = ref.radii[i + 1];
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double q = 0.0;
    for (int g = 0; g < 5; ++g) q += kGlWeight[g] * dphi(mid + half * kGlNode[g]);
    ref.phi[i] = ref.phi[i + 1] - half * q;
  }
  return ref;
}

std::vector<double> boundary_values(const std::vector<Vec>& points, const RadialReference& ref) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = ref.phi_at(norm(points[i]));
  return out;
}

}  // namespace apc
