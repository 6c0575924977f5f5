#include "apcloud/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace apc {

namespace {

// Transverse containment: does cell `outer` cover cell `inner` in every
// dimension except `d`? Requires outer.level <= inner.level.
bool contains_transverse(const QCell& outer, const QCell& inner, int d, int dim) {
  const int shift = inner.level - outer.level;
  for (int e = 0; e < dim; ++e) {
    if (e == d) continue;
    if ((inner.idx[e] >> shift) != outer.idx[e]) return false;
  }
  return true;
}

class Builder {
 public:
  Builder(const Octree& tree, const OpenObserver& observer)
      : tree_(tree), dim_(tree.domain.dim), observer_(observer) {
    add_cell(0, 0, -1, NodeClass::ErrorBalance);
  }

  std::vector<QCell>& queue() { return q_; }

  void run_phase1(const OpenPredicate& should_open) {
    for (std::size_t i = 0; i < q_.size(); ++i) {
      if (q_[i].opened) continue;
      if (should_open(q_[i])) {
        if (q_[i].level >= tree_.max_level)
          throw DepthExhaustedError(
              "node selection requires a cell below the tree's maximum depth " +
              std::to_string(tree_.max_level));
        open(static_cast<int>(i), NodeClass::ErrorBalance);
      }
    }
  }

  void run_balance() {
    int deepest = 0;
    for (const auto& c : q_) deepest = std::max(deepest, c.level);
    for (int l = deepest; l >= 1; --l) {
      for (std::size_t i = 0; i < q_.size(); ++i) {
        if (q_[i].opened || q_[i].level != l) continue;
        for (int f = 0; f < 2 * dim_; ++f) {
          while (true) {
            const int z = q_[i].nbr[f];
            if (z < 0 || q_[z].opened || q_[z].level >= l - 1) break;
            open(z, NodeClass::MeshBalance);
          }
        }
      }
    }
  }

 private:
  int add_cell(std::uint64_t key, int level, int parent, NodeClass cls) {
    QCell c;
    c.key = key;
    c.level = level;
    c.idx = morton_deinterleave(key, dim_, level);
    auto [first, count] = tree_.range(key, level);
    c.first = first;
    c.count = count;
    c.center = tree_.cell_center(key, level);
    c.edge = tree_.cell_edge(level);
    c.cls = cls;
    c.parent = parent;
    q_.push_back(c);
    return static_cast<int>(q_.size()) - 1;
  }

  // Deepest queue cell of level <= `level` adjacent to (reference cell ci)
  // across its face f, starting the descent from z.
  int descend(int z, int ci, int f) const {
    const int d = f / 2;
    const int s = f % 2;
    while (q_[z].opened && q_[z].level < q_[ci].level) {
      int next = -1;
      for (int b = 0; b < (1 << dim_); ++b) {
        if (((b >> d) & 1) != 1 - s) continue;  // must face back toward ci
        const int ch = q_[z].child[b];
        if (contains_transverse(q_[ch], q_[ci], d, dim_)) {
          next = ch;
          break;
        }
      }
      z = next;
    }
    return z;
  }

  void open(int y, NodeClass child_cls) {
    q_[y].opened = true;
    const int nchild = 1 << dim_;
    for (int b = 0; b < nchild; ++b)
      q_[y].child[b] = add_cell((q_[y].key << dim_) | static_cast<std::uint64_t>(b),
                                q_[y].level + 1, y, child_cls);

    // Initialize the neighbor lists of the new cells.
    for (int b = 0; b < nchild; ++b) {
      const int ci = q_[y].child[b];
      for (int d = 0; d < dim_; ++d) {
        const int bit = (b >> d) & 1;
        q_[ci].nbr[2 * d + (1 - bit)] = q_[y].child[b ^ (1 << d)];  // sibling face
        const int f = 2 * d + bit;                                  // outer face
        const int z = q_[y].nbr[f];
        q_[ci].nbr[f] = (z < 0) ? -1 : descend(z, ci, f);
      }
    }

    // Repoint the descendants of y's neighbors that referenced y.
    for (int f = 0; f < 2 * dim_; ++f) {
      const int z = q_[y].nbr[f];
      if (z < 0) continue;
      const int d = f / 2;
      const int s = f % 2;
      std::vector<int> stack{z};
      while (!stack.empty()) {
        const int w = stack.back();
        stack.pop_back();
        if (q_[w].nbr[f ^ 1] == y && q_[w].level > q_[y].level) {
          for (int b = 0; b < nchild; ++b) {
            if (((b >> d) & 1) != s) continue;  // children on y's face-f side
            const int ch = q_[y].child[b];
            if (contains_transverse(q_[ch], q_[w], d, dim_)) {
              q_[w].nbr[f ^ 1] = ch;
              break;
            }
          }
        }
        if (q_[w].opened)
          for (int b = 0; b < nchild; ++b)
            if (q_[w].child[b] >= 0) stack.push_back(q_[w].child[b]);
      }
    }

    if (observer_) observer_(q_, y);
  }

  const Octree& tree_;
  int dim_;
  std::vector<QCell> q_;
  OpenObserver observer_;
};

NodeSet finalize(const Octree& tree, std::vector<QCell> q) {
  NodeSet ns;
  ns.dim = tree.domain.dim;
  ns.domain = tree.domain;
  ns.queue_size = q.size();

  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].opened) continue;
    q[i].node = static_cast<int>(ns.pos.size());
    ns.pos.push_back(q[i].center);
    ns.h.push_back(q[i].edge);
    ns.cls.push_back(q[i].cls);
    ns.cell.push_back(static_cast<int>(i));
    ns.bd_face.push_back(-1);
  }
  ns.n_interior = ns.pos.size();

  // |Q| < (2^dim / (2^dim - 1)) * n must hold for any complete queue.
  const double cap = (static_cast<double>(1 << ns.dim) / ((1 << ns.dim) - 1)) *
                     static_cast<double>(ns.n_interior);
  if (!(static_cast<double>(q.size()) < cap))
    throw Error("selection queue size bound violated");

  // One boundary node per boundary face of each boundary-touching cell.
  std::map<std::pair<int, int>, int> bd_of;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].opened) continue;
    for (int f = 0; f < 2 * ns.dim; ++f) {
      if (q[i].nbr[f] >= 0) continue;
      const int d = f / 2;
      Vec p = q[i].center;
      p[d] += (f % 2 ? 0.5 : -0.5) * q[i].edge;
      bd_of[{static_cast<int>(i), f}] = static_cast<int>(ns.pos.size());
      ns.pos.push_back(p);
      ns.h.push_back(q[i].edge);
      ns.cls.push_back(NodeClass::Boundary);
      ns.cell.push_back(static_cast<int>(i));
      ns.bd_face.push_back(f);
    }
  }

  // 1-ring adjacency: per face either the boundary node, the coarser/equal
  // neighbor, or the finer candidates found by descending into it.
  ns.adj.assign(ns.pos.size(), {});
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i].opened) continue;
    auto& lst = ns.adj[q[i].node];
    for (int f = 0; f < 2 * ns.dim; ++f) {
      const int z = q[i].nbr[f];
      if (z < 0) {
        lst.push_back(bd_of.at({static_cast<int>(i), f}));
        continue;
      }
      std::vector<int> stack{z};
      while (!stack.empty()) {
        const int w = stack.back();
        stack.pop_back();
        if (!q[w].opened) {
          lst.push_back(q[w].node);
          continue;
        }
        for (int b = 0; b < (1 << ns.dim); ++b) {
          const int ch = q[w].child[b];
          if (ch >= 0 && face_adjacent(q[static_cast<int>(i)], q[ch], f, ns.dim))
            stack.push_back(ch);
        }
      }
    }
  }
  for (std::size_t b = ns.n_interior; b < ns.pos.size(); ++b)
    ns.adj[b].push_back(q[ns.cell[b]].node);

  ns.q = std::move(q);
  return ns;
}

}  // namespace

bool face_adjacent(const QCell& a, const QCell& b, int f, int dim) {
  const int d = f / 2;
  const int s = f % 2;
  const int level = std::max(a.level, b.level);
  std::array<std::uint64_t, 3> alo, ahi, blo, bhi;
  for (int e = 0; e < dim; ++e) {
    alo[e] = static_cast<std::uint64_t>(a.idx[e]) << (level - a.level);
    ahi[e] = (static_cast<std::uint64_t>(a.idx[e]) + 1) << (level - a.level);
    blo[e] = static_cast<std::uint64_t>(b.idx[e]) << (level - b.level);
    bhi[e] = (static_cast<std::uint64_t>(b.idx[e]) + 1) << (level - b.level);
  }
  if (s == 0 ? (bhi[d] != alo[d]) : (blo[d] != ahi[d])) return false;
  for (int e = 0; e < dim; ++e) {
    if (e == d) continue;
    if (std::max(alo[e], blo[e]) >= std::min(ahi[e], bhi[e])) return false;
  }
  return true;
}

NodeSet select_nodes(const Octree& tree, const RefinementConfig& config,
                     const OpenObserver& observer) {
  config.validate();
  const double expo = -1.0 / (2.0 * config.k - 2.0);
  const double c = config.c;
  return select_nodes_custom(
      tree,
      [c, expo](const QCell& cell) {
        if (cell.count == 0) return false;  // empty cells need no resolution
        return cell.edge > c * std::pow(static_cast<double>(cell.count), expo);
      },
      observer);
}

NodeSet select_nodes_custom(const Octree& tree, const OpenPredicate& should_open,
                            const OpenObserver& observer) {
  Builder b(tree, observer);
  b.run_phase1(should_open);
  b.run_balance();
  return finalize(tree, std::move(b.queue()));
}

std::vector<int> face_neighbors(int y, const std::vector<QCell>& cells,
                                const std::vector<int>& set, int dim) {
  std::set<std::pair<std::uint64_t, int>> in_set;  // (key, level)
  for (int i : set) in_set.insert({cells[i].key, cells[i].level});

  auto satisfies = [&](const QCell& z) {
    if (z.level > cells[y].level) return false;
    for (int f = 0; f < 2 * dim; ++f)
      if (face_adjacent(cells[y], z, f, dim)) return true;
    return false;
  };

  std::vector<int> out;
  for (int zi : set) {
    if (zi == y) continue;
    const QCell& z = cells[zi];
    if (!satisfies(z)) continue;
    bool ancestor_hit = false;
    QCell anc = z;
    while (anc.level > 0 && !ancestor_hit) {
      anc.key >>= dim;
      anc.level -= 1;
      anc.idx = morton_deinterleave(anc.key, dim, anc.level);
      if (in_set.count({anc.key, anc.level}) && satisfies(anc)) ancestor_hit = true;
    }
    if (!ancestor_hit) out.push_back(zi);
  }
  return out;
}

std::vector<int> ring_candidates(const NodeSet& nodes, int node, int required) {
  std::set<int> pool;
  std::vector<int> frontier{node};
  for (int ring = 1; ring <= 5; ++ring) {
    std::vector<int> next;
    for (int j : frontier)
      for (int nb : nodes.adj[j])
        if (nb != node && pool.insert(nb).second) next.push_back(nb);
    if (static_cast<int>(pool.size()) >= required) break;
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return {pool.begin(), pool.end()};
}

namespace {

int octant_of(const Vec& offset, int dim) {
  double a = std::atan2(offset[1], offset[0]);
  if (a < 0.0) a += 2.0 * M_PI;
  int sector = static_cast<int>(a / (0.5 * M_PI));
  if (sector > 3) sector = 3;
  if (dim == 2) return sector;
  const int bz = offset[2] > 0.0 ? 1 : (offset[2] < 0.0 ? 0 : (sector & 1));
  return sector + 4 * bz;
}

}  // namespace

std::vector<int> gfd_neighbor_select(const NodeSet& nodes, int node, int required) {
  auto cands = ring_candidates(nodes, node, required);
  if (static_cast<int>(cands.size()) < required)
    throw StencilStarvationError("node " + std::to_string(node) + " has only " +
                                 std::to_string(cands.size()) +
                                 " stencil candidates within the 5-ring");

  std::sort(cands.begin(), cands.end(), [&](int a, int b) {
    const double da = norm(nodes.pos[a] - nodes.pos[node]);
    const double db = norm(nodes.pos[b] - nodes.pos[node]);
    return da != db ? da < db : a < b;
  });

  const int n_oct = nodes.dim == 2 ? 4 : 8;
  std::vector<int> per_octant(n_oct, 0);
  std::vector<char> chosen(cands.size(), 0);
  std::vector<int> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    const int o = octant_of(nodes.pos[cands[i]] - nodes.pos[node], nodes.dim);
    if (per_octant[o] < 2) {
      ++per_octant[o];
      chosen[i] = 1;
      out.push_back(cands[i]);
    }
  }
  for (std::size_t i = 0; i < cands.size() && static_cast<int>(out.size()) < required; ++i) {
    if (chosen[i]) continue;
    chosen[i] = 1;
    out.push_back(cands[i]);
  }
  return out;
}

int NodeSet::locate(const Vec& p) const {
  if (!domain.contains(p)) throw OutOfDomainError("locate: position outside domain");
  int i = 0;
  while (q[i].opened) {
    int b = 0;
    for (int d = 0; d < dim; ++d)
      if (p[d] >= q[i].center[d]) b |= 1 << d;
    i = q[i].child[b];
  }
  return q[i].node;
}

}  // namespace apc
