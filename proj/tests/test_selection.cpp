#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "apcloud/beam.hpp"
#include "apcloud/selection.hpp"

using namespace apc;

namespace {

std::vector<Particle> uniform_grid_particles(int per_dim, int dim) {
  std::vector<Particle> out;
  const int n = dim == 2 ? per_dim * per_dim : per_dim * per_dim * per_dim;
  for (int k = 0; k < (dim == 3 ? per_dim : 1); ++k)
    for (int j = 0; j < per_dim; ++j)
      for (int i = 0; i < per_dim; ++i) {
        Vec p = vec2(-1.0 + (i + 0.5) * 2.0 / per_dim, -1.0 + (j + 0.5) * 2.0 / per_dim);
        if (dim == 3) p[2] = -1.0 + (k + 0.5) * 2.0 / per_dim;
        out.push_back({p, 1.0 / n});
      }
  return out;
}

std::vector<int> unopened_cells(const std::vector<QCell>& q) {
  std::vector<int> out;
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!q[i].opened) out.push_back(static_cast<int>(i));
  return out;
}

// expected nbr pointer: the deepest queue cell with level <= own, adjacent
// across face f; -1 when the face lies on the domain boundary
int brute_force_pointer(const std::vector<QCell>& q, int i, int f, int dim) {
  int best = -1;
  for (std::size_t z = 0; z < q.size(); ++z) {
    if (static_cast<int>(z) == i) continue;
    if (q[z].level > q[i].level) continue;
    if (!face_adjacent(q[i], q[z], f, dim)) continue;
    if (best < 0 || q[z].level > q[best].level) best = static_cast<int>(z);
  }
  return best;
}

}  // namespace

TEST_CASE("root satisfying the criterion yields one interior node") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(8, 2), dom, 5);
  RefinementConfig cfg;
  cfg.c = 100.0;
  const NodeSet ns = select_nodes(t, cfg);
  CHECK(ns.n_interior == 1);
  CHECK(ns.size() == 5);  // root center + 4 boundary faces
  CHECK(ns.cls[0] == NodeClass::ErrorBalance);
  CHECK(ns.queue_size == 1);
  for (std::size_t b = 1; b < ns.size(); ++b) {
    CHECK(ns.is_boundary(static_cast<int>(b)));
    CHECK(std::max(std::abs(ns.pos[b][0]), std::abs(ns.pos[b][1])) == doctest::Approx(1.0));
  }
}

TEST_CASE("tie at the threshold does not open") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree({Particle{vec2(0.1, 0.1), 1.0}}, dom, 3);
  RefinementConfig cfg;
  cfg.c = 2.0;  // root edge 2 == c * 1^(-1/2)
  CHECK(select_nodes(t, cfg).n_interior == 1);
  cfg.c = 1.99;
  CHECK(select_nodes(t, cfg).n_interior > 1);
}

TEST_CASE("empty cells are never opened by the criterion") {
  const Domain dom = Domain::unit_box(2);
  // all particles in one quadrant: the three empty quadrants stay leaves
  std::vector<Particle> parts;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int i = 0; i < 500; ++i) parts.push_back({vec2(u(rng), u(rng)), 1.0 / 500});
  const Octree t = build_octree(parts, dom, 6);
  RefinementConfig cfg;
  cfg.c = 0.3;
  const NodeSet ns = select_nodes(t, cfg);
  CHECK(ns.n_interior > 1);
  // any opened empty cell must come from the balance phase, which marks all
  // the children it creates as mesh-balance
  for (const QCell& cell : ns.q) {
    if (!cell.opened || cell.count > 0) continue;
    for (int b = 0; b < 4; ++b) CHECK(ns.q[cell.child[b]].cls == NodeClass::MeshBalance);
  }
}

TEST_CASE("beam selection satisfies the structural invariants") {
  const Domain dom = Domain::unit_box(2);
  const auto parts = sample_gaussian_beam(benchmark_beam(2), 20000, 42, dom);
  const Octree t = build_octree(parts, dom, 12);
  RefinementConfig cfg;
  cfg.c = 0.15;
  const NodeSet ns = select_nodes(t, cfg);

  SUBCASE("2:1 balance holds for every face-adjacent candidate pair") {
    const auto cand = unopened_cells(ns.q);
    for (std::size_t a = 0; a < cand.size(); ++a)
      for (std::size_t b = a + 1; b < cand.size(); ++b)
        for (int f = 0; f < 4; ++f)
          if (face_adjacent(ns.q[cand[a]], ns.q[cand[b]], f, 2))
            CHECK(std::abs(ns.q[cand[a]].level - ns.q[cand[b]].level) <= 1);
  }
  SUBCASE("queue size bound") {
    CHECK(static_cast<double>(ns.queue_size) <
          (4.0 / 3.0) * static_cast<double>(ns.n_interior));
  }
  SUBCASE("both refinement classes appear") {
    int eb = 0, mb = 0, bd = 0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      if (ns.cls[i] == NodeClass::ErrorBalance) ++eb;
      if (ns.cls[i] == NodeClass::MeshBalance) ++mb;
      if (ns.cls[i] == NodeClass::Boundary) ++bd;
    }
    CHECK(eb > 0);
    CHECK(mb > 0);
    CHECK(bd > 0);
  }
  SUBCASE("boundary nodes sit on the domain boundary with the cell's spacing") {
    for (std::size_t i = ns.n_interior; i < ns.size(); ++i) {
      const double m = std::max(std::abs(ns.pos[i][0]), std::abs(ns.pos[i][1]));
      CHECK(m == doctest::Approx(1.0));
      CHECK(ns.h[i] == doctest::Approx(ns.q[ns.cell[i]].edge));
    }
  }
  SUBCASE("locate returns the containing cell") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.999, 0.999);
    for (int trial = 0; trial < 200; ++trial) {
      const Vec p = vec2(u(rng), u(rng));
      const int i = ns.locate(p);
      REQUIRE(i >= 0);
      REQUIRE(static_cast<std::size_t>(i) < ns.n_interior);
      for (int d = 0; d < 2; ++d) CHECK(std::abs(p[d] - ns.pos[i][d]) <= 0.5 * ns.h[i] + 1e-12);
    }
  }
}

TEST_CASE("decreasing c never loses error-balance nodes") {
  const Domain dom = Domain::unit_box(2);
  const auto parts = sample_gaussian_beam(benchmark_beam(2), 10000, 7, dom);
  const Octree t = build_octree(parts, dom, 12);
  std::size_t prev = 0;
  for (double c : {0.4, 0.2, 0.1, 0.05}) {
    RefinementConfig cfg;
    cfg.c = c;
    const NodeSet ns = select_nodes(t, cfg);
    std::size_t eb = 0;
    for (std::size_t i = 0; i < ns.n_interior; ++i)
      if (ns.cls[i] == NodeClass::ErrorBalance) ++eb;
    CHECK(eb >= prev);
    prev = eb;
  }
}

TEST_CASE("neighbor pointers match brute force after every open") {
  const Domain dom = Domain::unit_box(2);
  const auto parts = sample_gaussian_beam(benchmark_beam(2), 150, 11, dom);
  const Octree t = build_octree(parts, dom, 6);

  int audits = 0;
  OpenObserver audit = [&](const std::vector<QCell>& q, int) {
    ++audits;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (int f = 0; f < 4; ++f) CHECK(q[i].nbr[f] == brute_force_pointer(q, i, f, 2));
  };
  RefinementConfig cfg;
  cfg.c = 0.4;
  const NodeSet ns = select_nodes(t, cfg, audit);
  CHECK(audits > 0);

  // pointer-derived view equals the literal neighbor definition over the
  // unopened candidate set
  const auto cand = unopened_cells(ns.q);
  for (int i : cand) {
    const auto literal = face_neighbors(i, ns.q, cand, 2);
    for (int f = 0; f < 4; ++f) {
      const int p = ns.q[i].nbr[f];
      if (p >= 0 && !ns.q[p].opened) {
        CHECK(std::find(literal.begin(), literal.end(), p) != literal.end());
      }
    }
    for (int z : literal) {
      bool pointed = false;
      for (int f = 0; f < 4; ++f)
        if (ns.q[i].nbr[f] == z) pointed = true;
      CHECK(pointed);
    }
  }
}

TEST_CASE("literal face neighbors on hand-built sets") {
  // build a tiny queue by opening the root and one child
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(8, 2), dom, 5);
  const NodeSet ns = select_nodes_custom(t, [&](const QCell& c) {
    return c.level == 0 || (c.level == 1 && c.key == 0);  // root, then child 0
  });

  const auto cand = unopened_cells(ns.q);

  SUBCASE("root alone has no neighbors") {
    std::vector<QCell> root{ns.q[0]};
    CHECK(face_neighbors(0, root, {0}, 2).empty());
  }
  SUBCASE("siblings list each other") {
    // cells 2 and 4 are level-1 children 1 and 3 (east pair)
    int c1 = -1, c3 = -1;
    for (int i : cand) {
      if (ns.q[i].level == 1 && ns.q[i].key == 1) c1 = i;
      if (ns.q[i].level == 1 && ns.q[i].key == 3) c3 = i;
    }
    REQUIRE(c1 >= 0);
    REQUIRE(c3 >= 0);
    const auto n1 = face_neighbors(c1, ns.q, cand, 2);
    CHECK(std::find(n1.begin(), n1.end(), c3) != n1.end());
    const auto n3 = face_neighbors(c3, ns.q, cand, 2);
    CHECK(std::find(n3.begin(), n3.end(), c1) != n3.end());
  }
  SUBCASE("fine cell next to coarse cell, one direction only") {
    // a level-2 child of cell 0 adjacent to the level-1 cell with key 1
    int fine = -1, coarse = -1;
    for (int i : cand) {
      if (ns.q[i].level == 2 && ns.q[i].key == 1) fine = i;  // child 1 of child 0
      if (ns.q[i].level == 1 && ns.q[i].key == 1) coarse = i;
    }
    REQUIRE(fine >= 0);
    REQUIRE(coarse >= 0);
    const auto nf = face_neighbors(fine, ns.q, cand, 2);
    CHECK(std::find(nf.begin(), nf.end(), coarse) != nf.end());
    const auto nc = face_neighbors(coarse, ns.q, cand, 2);
    CHECK(std::find(nc.begin(), nc.end(), fine) == nc.end());
  }
}

TEST_CASE("uniform 2D stencil selection returns the 8 surrounding nodes") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(16, 2), dom, 6);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 3; });
  REQUIRE(ns.n_interior == 64);

  // pick a node well inside
  int node = -1;
  for (std::size_t i = 0; i < ns.n_interior; ++i)
    if (std::abs(ns.pos[i][0] - 0.125) < 1e-12 && std::abs(ns.pos[i][1] - 0.125) < 1e-12)
      node = static_cast<int>(i);
  REQUIRE(node >= 0);

  const auto sel = gfd_neighbor_select(ns, node, 8);
  REQUIRE(sel.size() == 8);
  std::set<int> uniq(sel.begin(), sel.end());
  CHECK(uniq.size() == 8);
  const double h = ns.h[node];
  for (int j : sel) {
    const Vec off = ns.pos[j] - ns.pos[node];
    CHECK(norm(off) <= std::sqrt(2.0) * h + 1e-12);
    CHECK(norm(off) >= h - 1e-12);
  }
}

TEST_CASE("uniform 3D stencil selection returns 17 nodes") {
  const Domain dom = Domain::unit_box(3);
  const Octree t = build_octree(uniform_grid_particles(8, 3), dom, 4);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 3; });
  REQUIRE(ns.n_interior == 512);

  int node = -1;
  for (std::size_t i = 0; i < ns.n_interior; ++i)
    if (norm(ns.pos[i] - vec3(0.125, 0.125, 0.125)) < 1e-12) node = static_cast<int>(i);
  REQUIRE(node >= 0);

  const auto sel = gfd_neighbor_select(ns, node, 17);
  REQUIRE(sel.size() == 17);
  std::set<int> uniq(sel.begin(), sel.end());
  CHECK(uniq.size() == 17);
  const double h = ns.h[node];
  for (int j : sel) CHECK(norm(ns.pos[j] - ns.pos[node]) <= std::sqrt(3.0) * h + 1e-12);
}

TEST_CASE("corner node tops up without duplicates") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(16, 2), dom, 6);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 3; });

  int corner = -1;
  for (std::size_t i = 0; i < ns.n_interior; ++i)
    if (norm(ns.pos[i] - vec2(-0.875, -0.875)) < 1e-12) corner = static_cast<int>(i);
  REQUIRE(corner >= 0);

  const auto sel = gfd_neighbor_select(ns, corner, 8);
  REQUIRE(sel.size() == 8);
  std::set<int> uniq(sel.begin(), sel.end());
  CHECK(uniq.size() == 8);
}

TEST_CASE("stencil starvation on a root-only node set") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(4, 2), dom, 4);
  RefinementConfig cfg;
  cfg.c = 100.0;
  const NodeSet ns = select_nodes(t, cfg);
  CHECK_THROWS_AS(gfd_neighbor_select(ns, 0, 8), StencilStarvationError);
}

TEST_CASE("depth exhaustion") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(8, 2), dom, 2);
  CHECK_THROWS_AS(select_nodes_custom(t, [](const QCell&) { return true; }),
                  DepthExhaustedError);
}

TEST_CASE("ring candidates grow with the ring and contain the 1-ring") {
  const Domain dom = Domain::unit_box(2);
  const Octree t = build_octree(uniform_grid_particles(16, 2), dom, 6);
  const NodeSet ns = select_nodes_custom(t, [](const QCell& c) { return c.level < 3; });
  int node = ns.locate(vec2(0.1, 0.1));
  const auto small = ring_candidates(ns, node, 4);
  const auto large = ring_candidates(ns, node, 30);
  CHECK(large.size() >= 30);
  CHECK(small.size() >= 4);
  for (int j : ns.adj[node])
    CHECK(std::find(large.begin(), large.end(), j) != large.end());
}

TEST_CASE("config validation") {
  RefinementConfig cfg;
  cfg.c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.c = 0.1;
  cfg.k = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
