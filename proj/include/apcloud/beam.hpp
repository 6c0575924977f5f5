#pragma once

#include <cstdint>
#include <vector>

#include "apcloud/core.hpp"

namespace apc {

// Two-component isotropic Gaussian mixture
//   rho(x) = a1 [ exp(-|x|^2/(2 tau1^2)) + a2 exp(-|x|^2/(2 tau2^2)) ],
// with a1 chosen so that the density integrates to 1 over the domain.
struct BeamParams {
  double tau1 = 0.02;  // core radius
  double tau2 = 0.3;   // halo width
  double a2 = 1e-5;    // halo intensity
  double a1 = 396.1;   // normalization, recomputed by normalize()
  int dim = 2;

  void validate() const;
};

// Integral of exp(-(x-c)^2/(2 tau^2)) over [a, b].
double gauss_line_integral(double a, double b, double c, double tau);

// Mass of one unit-amplitude Gaussian component over the box.
double component_mass(double tau, const Domain& domain, const Vec& center);

// Recomputes a1 so that the density integrates to 1 over the domain; returns
// the relative change against the a1 the caller supplied.
double normalize(BeamParams& params, const Domain& domain);

// Convenience: 2D/3D benchmark parameters on [-1,1]^dim, normalized.
BeamParams benchmark_beam(int dim);

double density_exact(const Vec& x, const BeamParams& params, const Vec& center = {0, 0, 0});

// Exact mean of the density over an axis-aligned cell, (1/vol) * integral.
double density_cell_average(const BeamParams& params, const Vec& cell_lo, const Vec& cell_hi,
                            const Domain& domain, const Vec& center = {0, 0, 0});

// i.i.d. sample from the density restricted to the domain; each particle
// carries charge 1/n. Deterministic for a fixed seed.
std::vector<Particle> sample_gaussian_beam(const BeamParams& params, std::size_t n,
                                           std::uint64_t seed, const Domain& domain,
                                           const Vec& center = {0, 0, 0});

}  // namespace apc
