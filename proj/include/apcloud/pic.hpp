#pragma once

#include <functional>
#include <string>
#include <vector>

#include "apcloud/core.hpp"
#include "apcloud/sparse.hpp"

namespace apc {

enum class KernelKind { NGP, CIC };

// Charge assignment kernel: symmetric, bounded by 1, unit integral.
struct KernelSpec {
  KernelKind kind = KernelKind::CIC;
  double radius() const { return kind == KernelKind::CIC ? 1.0 : 0.5; }  // in units of h
};

// Node-centered uniform Cartesian grid over the domain, boundary included:
// m cells and m+1 points per dimension.
struct UniformGrid {
  int dim = 2;
  int m = 0;
  Domain domain;
  double h = 0.0;

  UniformGrid(const Domain& dom, int cells);

  int points_per_dim() const { return m + 1; }
  std::size_t num_points() const;
  std::size_t index(int i, int j, int k = 0) const;
  Vec point(int i, int j, int k = 0) const;
  bool is_boundary(int i, int j, int k = 0) const;
};

// CIC deposition: rho(y) = (1/h^D) sum_i q_i Phi((p_i - y)/h).
std::vector<double> cic_deposit(const std::vector<Particle>& particles, const UniformGrid& grid);

// Dirichlet Poisson solve with the standard 5/7-point Laplacian.
std::vector<double> fd_poisson_solve(const UniformGrid& grid, const std::vector<double>& rho,
                                     const std::function<double(const Vec&)>& boundary_value,
                                     double tol = 1e-10, SolveReport* report = nullptr);

// Central differences inside, one-sided second order at the boundary.
std::vector<std::vector<double>> grid_gradient(const UniformGrid& grid,
                                               const std::vector<double>& phi);

// CIC interpolation of one grid field to the particle positions.
std::vector<double> cic_gather(const UniformGrid& grid, const std::vector<double>& field,
                               const std::vector<Particle>& particles);

struct PicSolution {
  UniformGrid grid;
  std::vector<double> rho, phi;
  std::vector<std::vector<double>> E;       // per component, on the grid
  std::vector<double> phi_p;                // at particles
  std::vector<std::vector<double>> E_p;     // per component, at particles
};

PicSolution pic_solve(const std::vector<Particle>& particles, const Domain& domain, int m,
                      const std::function<double(const Vec&)>& boundary_value,
                      double tol = 1e-10);

// CSV dump: i,j[,k],x,y[,z],rho,phi,Ex,Ey[,Ez]
void dump_grid_csv(const PicSolution& sol, const std::string& path);

}  // namespace apc
