#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "apcloud/bench.hpp"
#include "apcloud/solver.hpp"

using namespace apc;

namespace {

Octree beam_tree(int n, std::uint64_t seed) {
  const Domain dom = Domain::unit_box(2);
  return build_octree(sample_gaussian_beam(benchmark_beam(2), n, seed, dom), dom, 12);
}

}  // namespace

TEST_CASE("kernel moments") {
  const MomentCoefficients m = moment_coefficients(0.5, KernelSpec{KernelKind::NGP}, 2);
  CHECK(m.a0 == 1.0);
  for (int d = 0; d < 3; ++d) {
    CHECK(m.a1[d] == 0.0);
    CHECK(m.a2[d] == doctest::Approx(0.25 / 24.0));
  }
  CHECK_THROWS_AS(moment_coefficients(0.5, KernelSpec{KernelKind::CIC}, 2), ConfigError);
  CHECK_THROWS_AS(moment_coefficients(0.5, KernelSpec{KernelKind::NGP}, 3), ConfigError);
}

TEST_CASE("deposition onto node cells") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree({Particle{vec2(0.3, 0.3), 1.0}}, dom, 4);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 2; });
  const auto rho = ngp_deposit(t, ns);

  const int owner = ns.locate(vec2(0.3, 0.3));
  for (std::size_t i = 0; i < ns.n_interior; ++i) {
    if (static_cast<int>(i) == owner)
      CHECK(rho[i] == doctest::Approx(1.0 / (ns.h[i] * ns.h[i])));
    else
      CHECK(rho[i] == 0.0);
  }

  SUBCASE("charge conservation on an adaptive set") {
    const Octree tb = beam_tree(20000, 42);
    RefinementConfig cfg;
    cfg.c = 0.15;
    const NodeSet nsb = select_nodes(tb, cfg);
    const auto rb = ngp_deposit(tb, nsb);
    double total = 0.0;
    for (std::size_t i = 0; i < nsb.n_interior; ++i)
      total += rb[i] * std::pow(nsb.h[i], 2);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("density system") {
  const Octree t = beam_tree(20000, 42);
  RefinementConfig cfg;
  cfg.c = 0.15;
  const NodeSet ns = select_nodes(t, cfg);
  SolverConfig sc;
  sc.refine = cfg;
  const auto stencils = build_stencils(ns, sc);
  const auto rho_m = ngp_deposit(t, ns);
  const std::vector<double> bd(ns.size() - ns.n_interior, 1.0);
  const SparseSystem B = assemble_density_system(ns, stencils, rho_m, bd);

  SUBCASE("rows sum to one: B maps constants to constants") {
    const auto out = B.apply(std::vector<double>(ns.size(), 1.0));
    for (double v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("constant density is reproduced exactly on a uniform region") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(sample_gaussian_beam(benchmark_beam(2), 500, 1, dom), dom, 6);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 3; });
  SolverConfig sc;
  const auto stencils = build_stencils(ns, sc);
  std::vector<double> rho_m(ns.size(), 3.5);
  const std::vector<double> bd(ns.size() - ns.n_interior, 3.5);
  SparseSystem B = assemble_density_system(ns, stencils, rho_m, bd);
  const auto rho = krylov_solve(B, B.rhs, 1e-12, 1000);
  for (double v : rho) CHECK(v == doctest::Approx(3.5).epsilon(1e-9));
}

TEST_CASE("the moment correction recovers point values from cell averages") {
  BeamParams smooth;
  smooth.dim = 2;
  smooth.tau1 = 0.3;
  smooth.tau2 = 1.0;
  smooth.a2 = 0.0;
  smooth.a1 = 1.0;

  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(sample_gaussian_beam(smooth, 500, 1, dom), dom, 8);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 4; });
  SolverConfig sc;
  const auto stencils = build_stencils(ns, sc);
  const auto rho_m = exact_cell_average_deposit(ns, smooth);

  std::vector<double> bd(ns.size() - ns.n_interior);
  for (std::size_t j = 0; j < bd.size(); ++j)
    bd[j] = density_exact(ns.pos[ns.n_interior + j], smooth);
  SparseSystem B = assemble_density_system(ns, stencils, rho_m, bd);
  const auto rho = krylov_solve(B, B.rhs, 1e-12, 2000);

  double err_corrected = 0.0, err_raw = 0.0;
  for (std::size_t i = 0; i < ns.n_interior; ++i) {
    const double point = density_exact(ns.pos[i], smooth);
    err_corrected = std::max(err_corrected, std::abs(rho[i] - point));
    err_raw = std::max(err_raw, std::abs(rho_m[i] - point));
  }
  CHECK(err_corrected < 0.2 * err_raw);
}

TEST_CASE("poisson system structure") {
  const Octree t = beam_tree(20000, 42);
  RefinementConfig cfg;
  cfg.c = 0.15;
  const NodeSet ns = select_nodes(t, cfg);
  SolverConfig sc;
  sc.refine = cfg;
  const auto stencils = build_stencils(ns, sc);
  std::vector<double> bd(ns.size() - ns.n_interior, 7.0);
  const SparseSystem A =
      assemble_poisson_system(ns, stencils, std::vector<double>(ns.size(), 0.0), bd);

  const auto out = A.apply(std::vector<double>(ns.size(), 1.0));
  for (std::size_t i = 0; i < ns.n_interior; ++i) CHECK(std::abs(out[i]) < 1e-10);
  for (std::size_t i = ns.n_interior; i < ns.size(); ++i) CHECK(out[i] == doctest::Approx(1.0));
}

TEST_CASE("quadratic manufactured solution is exact on an adaptive node set") {
  const Octree t = beam_tree(20000, 42);
  RefinementConfig cfg;
  cfg.c = 0.15;
  const NodeSet ns = select_nodes(t, cfg);
  SolverConfig sc;
  sc.refine = cfg;
  const auto stencils = build_stencils(ns, sc);

  auto exact = [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; };
  std::vector<double> rho(ns.size(), 4.0);
  std::vector<double> bd(ns.size() - ns.n_interior);
  for (std::size_t j = 0; j < bd.size(); ++j) bd[j] = exact(ns.pos[ns.n_interior + j]);
  SparseSystem A = assemble_poisson_system(ns, stencils, rho, bd);
  const auto phi = krylov_solve(A, A.rhs, 1e-12, 5000);
  for (std::size_t i = 0; i < ns.size(); ++i)
    CHECK(std::abs(phi[i] - exact(ns.pos[i])) < 1e-8);
}

TEST_CASE("end-to-end pipeline") {
  const Octree t = beam_tree(5000, 42);
  SolverConfig sc;
  sc.refine.c = 0.2;

  SUBCASE("harmonic affine data propagates exactly to nodes and particles") {
    const FieldSolution sol = solve_fields(
        t, sc, [](const Vec& x) { return x[0] + x[1]; }, [](const Vec&) { return 0.0; },
        [](const Octree&, const NodeSet& ns) { return std::vector<double>(ns.size(), 0.0); });
    for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
      CHECK(std::abs(sol.phi[i] - (sol.nodes.pos[i][0] + sol.nodes.pos[i][1])) < 1e-8);
      CHECK(std::abs(sol.E[0][i] - 1.0) < 1e-8);
      CHECK(std::abs(sol.E[1][i] - 1.0) < 1e-8);
    }
    for (std::size_t p = 0; p < t.particles.size(); ++p) {
      const Vec& x = t.particles[p].pos;
      CHECK(std::abs(sol.phi_p[p] - (x[0] + x[1])) < 1e-8);
      CHECK(std::abs(sol.E_p[0][p] - 1.0) < 1e-8);
      CHECK(std::abs(sol.E_p[1][p] - 1.0) < 1e-8);
    }
  }

  SUBCASE("random quadratic data is exact end to end") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double axx = u(rng), ayy = u(rng), axy = u(rng), bx = u(rng), by = u(rng);
    auto exact = [&](const Vec& x) {
      return axx * x[0] * x[0] + ayy * x[1] * x[1] + axy * x[0] * x[1] + bx * x[0] + by * x[1];
    };
    const double lap = 2.0 * (axx + ayy);
    const FieldSolution sol = solve_fields(
        t, sc, exact, [&](const Vec&) { return lap; },
        [&](const Octree&, const NodeSet& ns) {
          return std::vector<double>(ns.size(), lap);
        });
    for (std::size_t i = 0; i < sol.nodes.size(); ++i)
      CHECK(std::abs(sol.phi[i] - exact(sol.nodes.pos[i])) < 1e-8);
    for (std::size_t p = 0; p < t.particles.size(); ++p) {
      const Vec& x = t.particles[p].pos;
      CHECK(std::abs(sol.phi_p[p] - exact(x)) < 1e-8);
      CHECK(std::abs(sol.E_p[0][p] - (2.0 * axx * x[0] + axy * x[1] + bx)) < 1e-8);
      CHECK(std::abs(sol.E_p[1][p] - (2.0 * ayy * x[1] + axy * x[0] + by)) < 1e-8);
    }
  }

  SUBCASE("timing breakdown has the seven stages") {
    REQUIRE(kStageLabels.size() == 7);
    const FieldSolution sol = solve_fields(
        t, sc, [](const Vec& x) { return x[0]; }, [](const Vec&) { return 0.0; },
        [](const Octree&, const NodeSet& ns) { return std::vector<double>(ns.size(), 0.0); });
    double total = 0.0;
    for (double s : sol.times.seconds) {
      CHECK(s >= 0.0);
      total += s;
    }
    CHECK(sol.times.total() == doctest::Approx(total));
  }

  SUBCASE("identical runs are bitwise identical") {
    auto run = [&]() {
      return solve_fields(
          t, sc, [](const Vec& x) { return x[0] * x[0] + x[1] * x[1]; },
          [](const Vec&) { return 4.0; });
    };
    const FieldSolution a = run();
    const FieldSolution b = run();
    CHECK(a.phi == b.phi);
    CHECK(a.rho == b.rho);
    CHECK(a.phi_p == b.phi_p);
  }
}

TEST_CASE("particle exactly at a node receives the nodal values") {
  const Domain dom = Domain::unit_box(2);
  std::vector<Particle> parts{Particle{vec2(0.25, 0.25), 1.0}};  // level-2 cell center
  for (int i = 0; i < 50; ++i)
    parts.push_back({vec2(-0.9 + 0.03 * i, 0.4), 0.0});
  const Octree t = build_octree(parts, dom, 6);
  SolverConfig sc;
  const FieldSolution sol = solve_fields(
      t, sc, [](const Vec& x) { return x[0] + 2.0 * x[1]; }, [](const Vec&) { return 0.0; },
      [](const Octree&, const NodeSet& ns) { return std::vector<double>(ns.size(), 0.0); },
      [](const QCell& c) { return c.level < 2; });

  // find the particle at (0.25, 0.25) in tree order and its owning node
  for (std::size_t p = 0; p < t.particles.size(); ++p) {
    if (norm(t.particles[p].pos - vec2(0.25, 0.25)) > 0.0) continue;
    const int node = sol.nodes.locate(vec2(0.25, 0.25));
    CHECK(sol.nodes.pos[node] == vec2(0.25, 0.25));
    CHECK(sol.phi_p[p] == doctest::Approx(sol.phi[node]).epsilon(1e-14));
    CHECK(sol.E_p[0][p] == doctest::Approx(sol.E[0][node]).epsilon(1e-12));
  }
}
