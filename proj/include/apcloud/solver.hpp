#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "apcloud/beam.hpp"
#include "apcloud/gfd.hpp"
#include "apcloud/octree.hpp"
#include "apcloud/pic.hpp"
#include "apcloud/selection.hpp"
#include "apcloud/sparse.hpp"

namespace apc {

// Kernel moments a of the deposition identity: a0 plus per-direction first
// and second moments, with the Taylor 1/l! factor folded into the order-2
// entries. Cross second moments of the cell-characteristic kernel vanish.
struct MomentCoefficients {
  double a0 = 1.0;
  std::array<double, 3> a1{0, 0, 0};
  std::array<double, 3> a2{0, 0, 0};  // pure d,d entries, value h^2/24
};

MomentCoefficients moment_coefficients(double h, const KernelSpec& kernel, int k);

struct SolverConfig {
  RefinementConfig refine;
  WeightForm weight_form = WeightForm::Normalized;
  double tol = 1e-10;
  int max_iter = 20000;
};

inline constexpr std::array<const char*, 7> kStageLabels{
    "Build quadtree",
    "Search nodes",
    "Build linear systems",
    "Solve linear system for rho",
    "Solve linear system for phi",
    "Find interpolation coefficient",
    "Interpolate",
};

struct StageTimes {
  std::array<double, 7> seconds{};
  double total() const {
    double t = 0.0;
    for (double s : seconds) t += s;
    return t;
  }
};

struct FieldSolution {
  NodeSet nodes;
  std::vector<double> rho_m;               // deposited density per node
  std::vector<double> rho;                 // corrected density
  std::vector<double> phi;
  std::vector<std::vector<double>> E;      // per component at nodes
  std::vector<double> phi_p;               // at particles (octree order)
  std::vector<std::vector<double>> E_p;
  StageTimes times;
};

// One GFD stencil per interior node; empty entry for boundary nodes.
std::vector<GfdStencil> build_stencils(const NodeSet& nodes, const SolverConfig& config);

// NGP deposition: node j receives (1/h_j^D) sum of charges in its cell.
std::vector<double> ngp_deposit(const Octree& tree, const NodeSet& nodes);

// Exact cell averages of a smooth density, the noise-free stand-in for
// Monte Carlo deposition.
std::vector<double> exact_cell_average_deposit(const NodeSet& nodes, const BeamParams& params,
                                               const Vec& center = {0, 0, 0});

// Row j: rho(y_j) + sum_d a2_d * (second-derivative weights on increments)
// equals the deposited value; boundary rows pin rho to boundary_density.
SparseSystem assemble_density_system(const NodeSet& nodes, const std::vector<GfdStencil>& stencils,
                                     const std::vector<double>& rho_m,
                                     const std::vector<double>& boundary_density);

// Interior rows: GFD Laplacian = rho; boundary rows: identity = boundary value.
SparseSystem assemble_poisson_system(const NodeSet& nodes, const std::vector<GfdStencil>& stencils,
                                     const std::vector<double>& rho,
                                     const std::vector<double>& boundary_phi);

// Deposition override, e.g. exact cell averages; default is ngp_deposit.
using DepositFn = std::function<std::vector<double>(const Octree&, const NodeSet&)>;

// Full pipeline on a prebuilt tree. boundary_phi maps a boundary node position
// to its Dirichlet value; boundary_rho likewise for the density closure.
FieldSolution solve_fields(const Octree& tree, const SolverConfig& config,
                           const std::function<double(const Vec&)>& boundary_phi,
                           const std::function<double(const Vec&)>& boundary_rho,
                           const DepositFn& deposit = {},
                           const OpenPredicate& custom_open = {});

// CSV dumps: nodes `x,y[,z],h,rho,phi,Ex,Ey[,Ez]` and particles
// `x,y[,z],phi,Ex,Ey[,Ez]` in the octree particle order.
void dump_nodes_csv(const FieldSolution& sol, const std::string& path);
void dump_particles_csv(const FieldSolution& sol, const Octree& tree, const std::string& path);

// Taylor evaluation of phi and E at the particle positions from the owning
// node's value and GFD derivatives.
void interpolate_to_particles(const Octree& tree, FieldSolution& sol,
                              const std::vector<DerivativeVector>& phi_derivs);

}  // namespace apc
