#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "apcloud/core.hpp"
#include "apcloud/morton.hpp"

namespace apc {

// Cell of the linear tree: a Morton prefix plus the contiguous range of
// sorted particles it contains.
struct OctreeCell {
  std::uint64_t key = 0;
  int level = 0;
  std::uint32_t first = 0;
  std::uint32_t count = 0;
};

// Linear Morton-ordered quadtree/octree. Particles are sorted by their key at
// max_level; cells at every level store (first, count) ranges into that array.
struct Octree {
  Domain domain;
  int max_level = 0;
  std::vector<Particle> particles;        // Morton order
  std::vector<std::uint64_t> keys;        // particle keys at max_level, ascending
  std::vector<std::uint32_t> original;    // sorted position -> input index
  std::vector<std::vector<OctreeCell>> levels;  // levels[l]: nonempty cells, key ascending

  // Particle range of an arbitrary (key, level) cell, resolved against the
  // sorted key array; works for empty cells too.
  std::pair<std::uint32_t, std::uint32_t> range(std::uint64_t key, int level) const;

  Vec cell_center(std::uint64_t key, int level) const {
    return morton_cell_center(key, level, domain.dim, domain);
  }
  double cell_edge(int level) const { return morton_cell_edge(level, domain); }
};

Octree build_octree(std::vector<Particle> particles, const Domain& domain, int max_level);

}  // namespace apc
