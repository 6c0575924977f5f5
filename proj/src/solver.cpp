#include "apcloud/solver.hpp"

#include <chrono>
#include <cmath>
#include <utility>

namespace apc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// row of the pure second derivative d,d in DerivativeVector order
int second_derivative_row(int dim, int d) { return dim + d * dim - d * (d - 1) / 2; }

}  // namespace

MomentCoefficients moment_coefficients(double h, const KernelSpec& kernel, int k) {
  if (kernel.kind != KernelKind::NGP)
    throw ConfigError("moment_coefficients: only the cell-characteristic kernel is supported");
  if (k != 2) throw ConfigError("moment_coefficients: only k = 2 is supported");
  MomentCoefficients m;
  m.a0 = 1.0;
  // (1/2) * (1/h) integral_{-h/2}^{h/2} x^2 dx = h^2/24
  for (int d = 0; d < 3; ++d) m.a2[d] = h * h / 24.0;
  return m;
}

std::vector<GfdStencil> build_stencils(const NodeSet& nodes, const SolverConfig& config) {
  const int required = default_required_neighbors(nodes.dim);
  std::vector<GfdStencil> stencils(nodes.size());
  std::vector<Vec> pos;
  for (std::size_t i = 0; i < nodes.n_interior; ++i) {
    auto attempt = [&](int want) {
      std::vector<int> nb = gfd_neighbor_select(nodes, static_cast<int>(i), want);
      pos.clear();
      for (int j : nb) pos.push_back(nodes.pos[j]);
      GfdStencil s = build_stencil(nodes.pos[i], pos, nodes.dim, config.refine.k,
                                   config.weight_form);
      s.center = static_cast<int>(i);
      s.neighbors = std::move(nb);
      return s;
    };
    try {
      stencils[i] = attempt(required);
    } catch (const IllConditionedStencilError&) {
      stencils[i] = attempt(required + 6);
    }
  }
  return stencils;
}

std::vector<double> ngp_deposit(const Octree& tree, const NodeSet& nodes) {
  std::vector<double> rho_m(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.n_interior; ++i) {
    const QCell& c = nodes.q[nodes.cell[i]];
    double q = 0.0;
    for (std::uint32_t p = c.first; p < c.first + c.count; ++p) q += tree.particles[p].charge;
    rho_m[i] = q / std::pow(nodes.h[i], nodes.dim);
  }
  return rho_m;
}

std::vector<double> exact_cell_average_deposit(const NodeSet& nodes, const BeamParams& params,
                                               const Vec& center) {
  std::vector<double> rho_m(nodes.size(), 0.0);
  for (std::size_t i = 0; i < nodes.n_interior; ++i) {
    const double half = 0.5 * nodes.h[i];
    Vec lo = nodes.pos[i], hi = nodes.pos[i];
    for (int d = 0; d < nodes.dim; ++d) {
      lo[d] -= half;
      hi[d] += half;
    }
    rho_m[i] = density_cell_average(params, lo, hi, nodes.domain, center);
  }
  return rho_m;
}

SparseSystem assemble_density_system(const NodeSet& nodes, const std::vector<GfdStencil>& stencils,
                                     const std::vector<double>& rho_m,
                                     const std::vector<double>& boundary_density) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::pair<int, SparseRow>> rows;
  rows.reserve(n);
  std::vector<double> b(n, 0.0);

  for (int i = 0; i < n; ++i) {
    if (nodes.is_boundary(i)) {
      rows.push_back({i, {{i, 1.0}}});
      b[i] = boundary_density[i - static_cast<int>(nodes.n_interior)];
      continue;
    }
    const GfdStencil& s = stencils[i];
    const MomentCoefficients mom = moment_coefficients(nodes.h[i], KernelSpec{KernelKind::NGP}, s.k);
    const std::size_t m = s.neighbors.size();
    SparseRow r;
    r.reserve(m + 1);
    double center_coeff = 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      double w = 0.0;
      for (int d = 0; d < nodes.dim; ++d)
        w += mom.a2[d] * s.dweights[second_derivative_row(nodes.dim, d) * m + j];
      r.push_back({s.neighbors[j], w});
      center_coeff -= w;
    }
    r.push_back({i, center_coeff});
    rows.push_back({i, std::move(r)});
    b[i] = rho_m[i];
  }

  SparseSystem sys = assemble(rows, n);
  sys.rhs = std::move(b);
  return sys;
}

SparseSystem assemble_poisson_system(const NodeSet& nodes, const std::vector<GfdStencil>& stencils,
                                     const std::vector<double>& rho,
                                     const std::vector<double>& boundary_phi) {
  const int n = static_cast<int>(nodes.size());
  std::vector<std::pair<int, SparseRow>> rows;
  rows.reserve(n);
  std::vector<double> b(n, 0.0);

  for (int i = 0; i < n; ++i) {
    if (nodes.is_boundary(i)) {
      rows.push_back({i, {{i, 1.0}}});
      b[i] = boundary_phi[i - static_cast<int>(nodes.n_interior)];
      continue;
    }
    const GfdStencil& s = stencils[i];
    auto [coeffs, center_coeff] = s.laplacian_row();
    SparseRow r;
    r.reserve(coeffs.size() + 1);
    for (std::size_t j = 0; j < coeffs.size(); ++j) r.push_back({s.neighbors[j], coeffs[j]});
    r.push_back({i, center_coeff});
    rows.push_back({i, std::move(r)});
    b[i] = rho[i];
  }

  SparseSystem sys = assemble(rows, n);
  sys.rhs = std::move(b);
  return sys;
}

void interpolate_to_particles(const Octree& tree, FieldSolution& sol,
                              const std::vector<DerivativeVector>& phi_derivs) {
  const int dim = sol.nodes.dim;
  const std::size_t np = tree.particles.size();
  sol.phi_p.assign(np, 0.0);
  sol.E_p.assign(dim, std::vector<double>(np, 0.0));
  for (std::size_t p = 0; p < np; ++p) {
    const Vec& x = tree.particles[p].pos;
    const int i = sol.nodes.locate(x);
    const DerivativeVector& dv = phi_derivs[i];
    sol.phi_p[p] = taylor_interpolate(x, sol.nodes.pos[i], sol.phi[i], dv, dv.k);
    const Vec off = x - sol.nodes.pos[i];
    for (int d = 0; d < dim; ++d) {
      double e = dv.grad(d);
      for (int e2 = 0; e2 < dim; ++e2) e += dv.hess(d, e2) * off[e2];
      sol.E_p[d][p] = e;
    }
  }
}

FieldSolution solve_fields(const Octree& tree, const SolverConfig& config,
                           const std::function<double(const Vec&)>& boundary_phi,
                           const std::function<double(const Vec&)>& boundary_rho,
                           const DepositFn& deposit, const OpenPredicate& custom_open) {
  FieldSolution sol;
  const int dim = tree.domain.dim;

  auto t = Clock::now();
  sol.nodes = custom_open ? select_nodes_custom(tree, custom_open)
                          : select_nodes(tree, config.refine);
  sol.times.seconds[1] = seconds_since(t);

  t = Clock::now();
  std::vector<GfdStencil> stencils = build_stencils(sol.nodes, config);

  sol.rho_m = deposit ? deposit(tree, sol.nodes) : ngp_deposit(tree, sol.nodes);
  if (sol.rho_m.size() != sol.nodes.size())
    throw ConfigError("solve_fields: deposited density size mismatch");

  const std::size_t nb = sol.nodes.size() - sol.nodes.n_interior;
  std::vector<double> bd_rho(nb), bd_phi(nb);
  for (std::size_t j = 0; j < nb; ++j) {
    const Vec& x = sol.nodes.pos[sol.nodes.n_interior + j];
    bd_rho[j] = boundary_rho ? boundary_rho(x) : 0.0;
    bd_phi[j] = boundary_phi(x);
  }

  SparseSystem density = assemble_density_system(sol.nodes, stencils, sol.rho_m, bd_rho);
  SparseSystem poisson_template = assemble_poisson_system(
      sol.nodes, stencils, std::vector<double>(sol.nodes.size(), 0.0), bd_phi);
  sol.times.seconds[2] = seconds_since(t);

  t = Clock::now();
  try {
    sol.rho = krylov_solve(density, density.rhs, config.tol, config.max_iter);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(std::string("density system: ") + e.what());
  }
  sol.times.seconds[3] = seconds_since(t);

  t = Clock::now();
  for (std::size_t i = 0; i < sol.nodes.n_interior; ++i) poisson_template.rhs[i] = sol.rho[i];
  try {
    sol.phi = krylov_solve(poisson_template, poisson_template.rhs, config.tol, config.max_iter);
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(std::string("potential system: ") + e.what());
  }
  sol.times.seconds[4] = seconds_since(t);

  t = Clock::now();
  std::vector<DerivativeVector> derivs(sol.nodes.size());
  std::vector<double> incr;
  sol.E.assign(dim, std::vector<double>(sol.nodes.size(), 0.0));
  for (std::size_t i = 0; i < sol.nodes.n_interior; ++i) {
    const GfdStencil& s = stencils[i];
    incr.resize(s.neighbors.size());
    for (std::size_t j = 0; j < s.neighbors.size(); ++j)
      incr[j] = sol.phi[s.neighbors[j]] - sol.phi[i];
    derivs[i] = s.apply(incr);
    for (int d = 0; d < dim; ++d) sol.E[d][i] = derivs[i].grad(d);
  }
  // boundary nodes: first-order Taylor of E from the generating interior node
  for (std::size_t i = sol.nodes.n_interior; i < sol.nodes.size(); ++i) {
    const int g = sol.nodes.adj[i].empty() ? -1 : sol.nodes.adj[i][0];
    if (g < 0) continue;
    const Vec off = sol.nodes.pos[i] - sol.nodes.pos[g];
    for (int d = 0; d < dim; ++d) {
      double e = derivs[g].grad(d);
      for (int e2 = 0; e2 < dim; ++e2) e += derivs[g].hess(d, e2) * off[e2];
      sol.E[d][i] = e;
    }
  }
  sol.times.seconds[5] = seconds_since(t);

  t = Clock::now();
  interpolate_to_particles(tree, sol, derivs);
  sol.times.seconds[6] = seconds_since(t);
  return sol;
}

}  // namespace apc
