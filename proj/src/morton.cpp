#include "apcloud/morton.hpp"

#include <string>

namespace apc {

std::array<std::uint32_t, 3> cell_indices(const Vec& pos, const Domain& domain, int level) {
  if (!domain.contains(pos))
    throw OutOfDomainError("position (" + std::to_string(pos[0]) + ", " +
                           std::to_string(pos[1]) + ", " + std::to_string(pos[2]) +
                           ") outside domain");
  const std::uint32_t cells = (level >= 32) ? 0xffffffffu : ((1u << level) - 1u) + 1u;
  std::array<std::uint32_t, 3> idx{0, 0, 0};
  for (int d = 0; d < domain.dim; ++d) {
    double t = (pos[d] - domain.lo[d]) / domain.edge(d);
    auto i = static_cast<std::uint64_t>(t * static_cast<double>(cells));
    if (i >= cells) i = cells - 1;  // upper boundary clamps to the last cell
    idx[d] = static_cast<std::uint32_t>(i);
  }
  return idx;
}

std::uint64_t morton_interleave(const std::array<std::uint32_t, 3>& idx, int dim, int level) {
  std::uint64_t key = 0;
  for (int b = 0; b < level; ++b)
    for (int d = 0; d < dim; ++d)
      key |= static_cast<std::uint64_t>((idx[d] >> b) & 1u) << (b * dim + d);
  return key;
}

std::array<std::uint32_t, 3> morton_deinterleave(std::uint64_t key, int dim, int level) {
  std::array<std::uint32_t, 3> idx{0, 0, 0};
  for (int b = 0; b < level; ++b)
    for (int d = 0; d < dim; ++d)
      idx[d] |= static_cast<std::uint32_t>((key >> (b * dim + d)) & 1u) << b;
  return idx;
}

MortonKey morton_encode(const Vec& pos, const Domain& domain, int level) {
  if (level < 0 || level > morton_max_level(domain.dim))
    throw CapacityError("morton level " + std::to_string(level) + " exceeds key width for " +
                        std::to_string(domain.dim) + "D");
  return MortonKey{morton_interleave(cell_indices(pos, domain, level), domain.dim, level),
                   level};
}

Vec morton_cell_center(std::uint64_t key, int level, int dim, const Domain& domain) {
  const auto idx = morton_deinterleave(key, dim, level);
  Vec c{0, 0, 0};
  const double scale = 1.0 / static_cast<double>(std::uint64_t{1} << level);
  for (int d = 0; d < dim; ++d)
    c[d] = domain.lo[d] + (static_cast<double>(idx[d]) + 0.5) * scale * domain.edge(d);
  return c;
}

}  // namespace apc
