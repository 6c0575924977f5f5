#include "apcloud/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "apcloud/csv.hpp"

namespace apc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

}  // namespace

const char* ErrorReport::csv_header() {
  return "method,dim,N,n_nodes,c,seed,err_phi,err_gradx,wall_time_s";
}

std::vector<std::string> ErrorReport::csv_row() const {
  return {method,          std::to_string(dim),  std::to_string(N),
          std::to_string(n_nodes), fmt17(c),     std::to_string(seed),
          fmt17(err_phi),  fmt17(err_gradx),     fmt17(wall_time)};
}

ErrorReport error_norms(const std::vector<double>& phi_p, const std::vector<double>& ex_p,
                        const std::vector<Particle>& particles, const RadialReference& ref,
                        const Vec& center) {
  double max_phi = 0.0, max_ex = 0.0, ss_phi = 0.0, ss_ex = 0.0;
  const std::size_t n = particles.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec off = particles[i].pos - center;
    const double r = norm(off);
    const double rphi = ref.phi_at(r);
    const double rex = r > 0.0 ? ref.dphi_at(r) * off[0] / r : 0.0;
    max_phi = std::max(max_phi, std::abs(rphi));
    max_ex = std::max(max_ex, std::abs(rex));
    ss_phi += (phi_p[i] - rphi) * (phi_p[i] - rphi);
    ss_ex += (ex_p[i] - rex) * (ex_p[i] - rex);
  }
  ErrorReport rep;
  rep.dim = ref.dim;
  rep.N = n;
  rep.err_phi = max_phi > 0.0 ? std::sqrt(ss_phi / n) / max_phi : std::sqrt(ss_phi / n);
  rep.err_gradx = max_ex > 0.0 ? std::sqrt(ss_ex / n) / max_ex : std::sqrt(ss_ex / n);
  return rep;
}

ErrorReport run_apcloud(const std::vector<Particle>& particles, const RadialReference& ref,
                        const SolverConfig& config, int max_level, StageTimes* times,
                        std::size_t* n_interior) {
  const Domain domain = Domain::unit_box(ref.dim);
  const BeamParams params = ref.params;

  const auto t0 = Clock::now();
  auto t = Clock::now();
  Octree tree = build_octree(particles, domain, max_level);
  const double t_tree = seconds_since(t);

  FieldSolution sol = solve_fields(
      tree, config, [&](const Vec& x) { return ref.phi_at(norm(x)); },
      [&](const Vec& x) { return density_exact(x, params); });
  sol.times.seconds[0] = t_tree;
  const double wall = seconds_since(t0);

  ErrorReport rep = error_norms(sol.phi_p, sol.E_p[0], tree.particles, ref);
  rep.method = "apcloud";
  rep.n_nodes = sol.nodes.size();
  rep.c = config.refine.c;
  rep.wall_time = wall;
  if (times) *times = sol.times;
  if (n_interior) *n_interior = sol.nodes.n_interior;
  return rep;
}

ErrorReport run_pic(const std::vector<Particle>& particles, const RadialReference& ref, int m,
                    double tol) {
  const Domain domain = Domain::unit_box(ref.dim);
  const auto t0 = Clock::now();
  PicSolution sol = pic_solve(particles, domain, m,
                              [&](const Vec& x) { return ref.phi_at(norm(x)); }, tol);
  const double wall = seconds_since(t0);

  ErrorReport rep = error_norms(sol.phi_p, sol.E_p[0], particles, ref);
  rep.method = "pic";
  rep.n_nodes = sol.grid.num_points();
  rep.wall_time = wall;
  return rep;
}

std::vector<ConvergenceRow> convergence_study_noise_free(const BeamParams& params,
                                                         const std::vector<double>& c_ladder,
                                                         const std::vector<Particle>& particles,
                                                         int max_level,
                                                         const RadialReference& ref) {
  const Domain domain = Domain::unit_box(params.dim);
  Octree tree = build_octree(particles, domain, max_level);
  const double N = static_cast<double>(particles.size());

  std::vector<ConvergenceRow> rows;
  for (double c : c_ladder) {
    SolverConfig config;
    config.refine.c = c;
    // Noise-free protocol: the sampled per-cell counts in the refinement
    // criterion are replaced by their expectations under the exact density,
    // just as the deposited density is replaced by its exact cell average.
    // Otherwise cells that happen to hold no samples never refine and the
    // error stalls at their fixed resolution.
    const double expo = -1.0 / (2.0 * config.refine.k - 2.0);
    auto open = [&, c, expo](const QCell& cell) {
      Vec lo = cell.center, hi = cell.center;
      for (int d = 0; d < params.dim; ++d) {
        lo[d] -= cell.edge / 2;
        hi[d] += cell.edge / 2;
      }
      const double count = N * density_cell_average(params, lo, hi, domain) *
                           std::pow(cell.edge, params.dim);
      return count > 0 && cell.edge > c * std::pow(count, expo);
    };
    FieldSolution sol = solve_fields(
        tree, config, [&](const Vec& x) { return ref.phi_at(norm(x)); },
        [&](const Vec& x) { return density_exact(x, params); },
        [&](const Octree&, const NodeSet& nodes) {
          return exact_cell_average_deposit(nodes, params);
        },
        open);
    ErrorReport rep = error_norms(sol.phi_p, sol.E_p[0], tree.particles, ref);

    ConvergenceRow row;
    row.n = sol.nodes.size();
    row.err_phi = rep.err_phi;
    row.err_gradx = rep.err_gradx;
    if (!rows.empty()) {
      const ConvergenceRow& prev = rows.back();
      const double hr = std::log(static_cast<double>(row.n) / prev.n) / params.dim;
      row.order_phi = std::log(prev.err_phi / row.err_phi) / hr;
      row.order_gradx = std::log(prev.err_gradx / row.err_gradx) / hr;
    }
    rows.push_back(row);
  }
  return rows;
}

NoiseScaling mc_noise_scaling(const BeamParams& params, const std::vector<std::size_t>& Ns,
                              int seeds_per, double probe_edge) {
  const Domain domain = Domain::unit_box(params.dim);
  NoiseScaling out;
  out.N = Ns;
  const double cell_volume = std::pow(probe_edge, params.dim);

  std::vector<double> lx, ly;
  for (std::size_t N : Ns) {
    std::vector<double> rho(seeds_per);
    for (int s = 0; s < seeds_per; ++s) {
      const auto particles =
          sample_gaussian_beam(params, N, 1000 + static_cast<std::uint64_t>(s), domain);
      std::size_t count = 0;
      for (const auto& p : particles) {
        bool in = true;
        for (int d = 0; d < params.dim; ++d)
          if (p.pos[d] < 0.0 || p.pos[d] >= probe_edge) in = false;
        if (in) ++count;
      }
      rho[s] = static_cast<double>(count) / (static_cast<double>(N) * cell_volume);
    }
    double mean = 0.0;
    for (double v : rho) mean += v;
    mean /= seeds_per;
    double var = 0.0;
    for (double v : rho) var += (v - mean) * (v - mean);
    var /= (seeds_per - 1);
    out.stddev.push_back(std::sqrt(var));
    lx.push_back(std::log(static_cast<double>(N)));
    ly.push_back(std::log(out.stddev.back()));
  }
  out.slope = ls_slope(lx, ly);
  return out;
}

SelfForceResult self_force_scan(const SelfForceSetup& setup, const std::vector<Vec>& path) {
  const Domain domain = Domain::unit_box(setup.dim);
  const double h_f = domain.edge(0) / std::pow(2.0, setup.finest_level);
  const double tau = setup.tau > 0.0 ? setup.tau : 6.0 * h_f;

  BeamParams blob;
  blob.dim = setup.dim;
  blob.tau1 = tau;
  blob.tau2 = 1.0;
  blob.a2 = 0.0;
  blob.a1 = 1.0 / std::pow(2.0 * M_PI * tau * tau, setup.dim / 2.0);  // unit free-space charge
  const RadialReference ref = radial_reference_solve(blob, setup.dim);

  SelfForceResult result;
  result.field_scale = 0.0;
  for (double d : ref.dphi) result.field_scale = std::max(result.field_scale, std::abs(d));

  const double r0 = 3.0 * tau;
  for (const Vec& center : path) {
    auto desired_level = [&](const QCell& cell) {
      double dist = norm(cell.center - center) - 0.5 * cell.edge * std::sqrt(double(setup.dim));
      dist = std::max(dist, 0.0);
      int lvl = setup.finest_level;
      if (dist > r0) lvl -= static_cast<int>(std::floor(std::log2(dist / r0))) + 1;
      return std::max(lvl, setup.coarsest_level);
    };
    OpenPredicate open = [&](const QCell& cell) { return cell.level < desired_level(cell); };

    std::vector<Particle> probe{Particle{center, 1.0}};
    Octree tree = build_octree(probe, domain, setup.finest_level);
    FieldSolution sol = solve_fields(
        tree, setup.config, [&](const Vec& x) { return ref.phi_at(norm(x - center)); },
        [&](const Vec& x) { return density_exact(x, blob, center); },
        [&](const Octree&, const NodeSet& nodes) {
          return exact_cell_average_deposit(nodes, blob, center);
        },
        open);

    double r2 = 0.0;
    for (int d = 0; d < setup.dim; ++d) r2 += sol.E_p[d][0] * sol.E_p[d][0];
    result.positions.push_back(center);
    result.residual.push_back(std::sqrt(r2));
    result.n_nodes.push_back(sol.nodes.size());
  }
  return result;
}

Trajectory integrate_leapfrog(const Vec& x0, const Vec& v0, double dt, int steps,
                              const std::function<Vec(const Vec&)>& force) {
  Trajectory traj;
  Vec x = x0, v = v0;
  traj.pos.push_back(x);
  traj.vel.push_back(v);
  Vec f = force(x);
  for (int s = 0; s < steps; ++s) {
    v = v + (0.5 * dt) * f;
    x = x + dt * v;
    f = force(x);
    v = v + (0.5 * dt) * f;
    traj.pos.push_back(x);
    traj.vel.push_back(v);
  }
  return traj;
}

}  // namespace apc
