#pragma once

#include <cstdint>

#include "apcloud/core.hpp"

namespace apc {

// Bit-interleaved cell path on a dyadic grid. Dimension 0 occupies the least
// significant bit of each bit-group.
struct MortonKey {
  std::uint64_t key = 0;
  int level = 0;
};

// Deepest level representable on a 64-bit key.
inline int morton_max_level(int dim) { return dim == 2 ? 31 : 21; }

// Per-dimension cell index of a position at the given level. Points on the
// upper domain boundary clamp to the last cell.
std::array<std::uint32_t, 3> cell_indices(const Vec& pos, const Domain& domain, int level);

std::uint64_t morton_interleave(const std::array<std::uint32_t, 3>& idx, int dim, int level);
std::array<std::uint32_t, 3> morton_deinterleave(std::uint64_t key, int dim, int level);

MortonKey morton_encode(const Vec& pos, const Domain& domain, int level);

// Center and edge length of the cell addressed by (key, level).
Vec morton_cell_center(std::uint64_t key, int level, int dim, const Domain& domain);
inline double morton_cell_edge(int level, const Domain& domain) {
  // Benchmark domains are cubes; use dimension 0.
  return domain.edge(0) / static_cast<double>(std::uint64_t{1} << level);
}

}  // namespace apc
