#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "apcloud/octree.hpp"

namespace apc {

enum class NodeClass { ErrorBalance, MeshBalance, Boundary };

inline const char* node_class_tag(NodeClass c) {
  switch (c) {
    case NodeClass::ErrorBalance: return "EB";
    case NodeClass::MeshBalance: return "MB";
    default: return "BD";
  }
}

struct RefinementConfig {
  double c = 0.04;  // tuning parameter of the error-balance criterion
  int k = 2;        // derivative order of the GFD scheme

  void validate() const {
    if (c <= 0.0) throw ConfigError("refinement: c must be positive");
    if (k < 2) throw ConfigError("refinement: k must be >= 2");
  }
};

// Cell in the selection queue. Faces are indexed 2*d + side (0 = low,
// 1 = high); nbr[f] is the deepest queue cell of level <= own level adjacent
// across that face, -1 on the domain boundary.
struct QCell {
  std::uint64_t key = 0;
  int level = 0;
  std::array<std::uint32_t, 3> idx{0, 0, 0};
  std::uint32_t first = 0;
  std::uint32_t count = 0;
  Vec center{0, 0, 0};
  double edge = 0.0;
  bool opened = false;
  NodeClass cls = NodeClass::ErrorBalance;
  int parent = -1;
  std::array<int, 8> child{-1, -1, -1, -1, -1, -1, -1, -1};
  std::array<int, 6> nbr{-1, -1, -1, -1, -1, -1};
  int node = -1;  // node index once selected
};

// Selected computational nodes: interior nodes first (one per not-opened
// queue cell), boundary nodes appended.
struct NodeSet {
  int dim = 2;
  Domain domain;
  std::vector<Vec> pos;
  std::vector<double> h;       // edge of the generating cell
  std::vector<NodeClass> cls;
  std::vector<int> cell;       // generating queue cell
  std::vector<int> bd_face;    // boundary face of the cell, -1 for interior
  std::size_t n_interior = 0;
  std::size_t queue_size = 0;  // |Q| at the end of selection

  std::vector<QCell> q;                 // frozen selection queue
  std::vector<std::vector<int>> adj;    // 1-ring adjacency per node

  std::size_t size() const { return pos.size(); }
  bool is_boundary(int i) const { return cls[i] == NodeClass::Boundary; }

  // Interior node whose cell contains the position.
  int locate(const Vec& p) const;
};

// True when cells a and b are adjacent across face f of a (share a
// (dim-1)-dimensional face); exact integer test on dyadic indices.
bool face_adjacent(const QCell& a, const QCell& b, int f, int dim);

// Invoked after every open with the queue and the opened cell's index.
using OpenObserver = std::function<void(const std::vector<QCell>&, int)>;
// Custom refinement predicate: return true to open the cell.
using OpenPredicate = std::function<bool(const QCell&)>;

NodeSet select_nodes(const Octree& tree, const RefinementConfig& config,
                     const OpenObserver& observer = {});
NodeSet select_nodes_custom(const Octree& tree, const OpenPredicate& should_open,
                            const OpenObserver& observer = {});

// Literal neighbor definition on an explicit cell set: z in set is a neighbor
// of y when they share a face, level(z) <= level(y), and no ancestor of z in
// the set satisfies the same conditions.
std::vector<int> face_neighbors(int y, const std::vector<QCell>& cells,
                                const std::vector<int>& set, int dim);

inline int default_required_neighbors(int dim) { return dim == 2 ? 8 : 17; }

// Candidate pool: expand k-rings (up to the 5-ring) until `required` nodes
// are available; may return fewer (the caller decides whether that is fatal).
std::vector<int> ring_candidates(const NodeSet& nodes, int node, int required);

// Up to two nearest candidates per quadrant/octant, topped up with globally
// nearest remaining candidates; throws StencilStarvationError if the 5-ring
// holds fewer than `required` candidates.
std::vector<int> gfd_neighbor_select(const NodeSet& nodes, int node, int required);

}  // namespace apc
