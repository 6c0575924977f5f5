#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "apcloud/radial.hpp"
#include "apcloud/solver.hpp"

namespace apc {

struct ErrorReport {
  std::string method;  // "apcloud" or "pic"
  int dim = 2;
  std::size_t N = 0;
  std::size_t n_nodes = 0;  // nodes (apcloud) or grid points (pic)
  double c = 0.0;           // tuning parameter, 0 for pic
  std::uint64_t seed = 0;
  double err_phi = 0.0;
  double err_gradx = 0.0;
  double wall_time = 0.0;

  std::vector<std::string> csv_row() const;
  static const char* csv_header();
};

// RMS over particles normalized by the max |reference| over particles, for phi
// and for the x-component of the field (reference E_x = phi'(r) x/r).
ErrorReport error_norms(const std::vector<double>& phi_p, const std::vector<double>& ex_p,
                        const std::vector<Particle>& particles, const RadialReference& ref,
                        const Vec& center = {0, 0, 0});

ErrorReport run_apcloud(const std::vector<Particle>& particles, const RadialReference& ref,
                        const SolverConfig& config, int max_level, StageTimes* times = nullptr,
                        std::size_t* n_interior = nullptr);

ErrorReport run_pic(const std::vector<Particle>& particles, const RadialReference& ref, int m,
                    double tol = 1e-10);

struct ConvergenceRow {
  std::size_t n = 0;
  double err_phi = 0.0, err_gradx = 0.0;
  double order_phi = 0.0, order_gradx = 0.0;  // 0 in the first row
};

// Table-4 protocol: deposition replaced by exact cell averages of the
// benchmark density, c halved per ladder step.
std::vector<ConvergenceRow> convergence_study_noise_free(const BeamParams& params,
                                                         const std::vector<double>& c_ladder,
                                                         const std::vector<Particle>& particles,
                                                         int max_level,
                                                         const RadialReference& ref);

struct NoiseScaling {
  std::vector<std::size_t> N;
  std::vector<double> stddev;  // of the deposited density at the probe cell
  double slope = 0.0;          // of log stddev vs log N
};

// Direct box counting of samples in a fixed probe cell, many seeds per N.
NoiseScaling mc_noise_scaling(const BeamParams& params, const std::vector<std::size_t>& Ns,
                              int seeds_per, double probe_edge = 0.125);

struct SelfForceResult {
  std::vector<Vec> positions;
  std::vector<double> residual;  // |E| interpolated at the blob center
  double field_scale = 0.0;      // max |phi'| of the blob's own radial field
  std::vector<std::size_t> n_nodes;
};

struct SelfForceSetup {
  int dim = 2;
  int finest_level = 6;
  int coarsest_level = 3;
  double tau = 0.0;  // 0: six finest cells
  SolverConfig config;
};

// Gaussian blob centered at each path position, nodes refined toward the
// blob, boundary data from the blob's own recentered radial field; the exact
// field at the center is zero, so |E(center)| is pure discretization error.
SelfForceResult self_force_scan(const SelfForceSetup& setup, const std::vector<Vec>& path);

struct Trajectory {
  std::vector<Vec> pos, vel;
};

// Kick-drift-kick integration of dx/dt = v, dv/dt = force(x).
Trajectory integrate_leapfrog(const Vec& x0, const Vec& v0, double dt, int steps,
                              const std::function<Vec(const Vec&)>& force);

}  // namespace apc
