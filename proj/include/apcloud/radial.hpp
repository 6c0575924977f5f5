#pragma once

#include <vector>

#include "apcloud/beam.hpp"
#include "apcloud/core.hpp"

namespace apc {

// Radially symmetric benchmark field on [0, 2]: phi solves
//   (1/r^{D-1}) (r^{D-1} phi')' = rho(r),  phi'(0) = 0,  phi(2) = 0.
struct RadialReference {
  int dim = 2;
  BeamParams params;
  std::vector<double> radii;  // strictly increasing, graded toward 0
  std::vector<double> phi;
  std::vector<double> dphi;

  double r_max() const { return radii.back(); }
  double phi_at(double r) const;
  double dphi_at(double r) const;  // exact (analytic enclosed charge)
};

// Enclosed radial moment M(r) = integral_0^r rho(s) s^{D-1} ds, closed form.
double radial_moment(double r, const BeamParams& params);

RadialReference radial_reference_solve(const BeamParams& params, int dim, int points = 100000);

// phi(|x|) for each point; |x| > 2 throws OutOfDomainError.
std::vector<double> boundary_values(const std::vector<Vec>& points, const RadialReference& ref);

}  // namespace apc
