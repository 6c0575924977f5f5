#include "apcloud/octree.hpp"

#include <algorithm>
#include <numeric>

namespace apc {

std::pair<std::uint32_t, std::uint32_t> Octree::range(std::uint64_t key, int level) const {
  const int shift = (max_level - level) * domain.dim;
  const std::uint64_t lo = key << shift;
  const std::uint64_t hi = (key + 1) << shift;
  const auto first = std::lower_bound(keys.begin(), keys.end(), lo) - keys.begin();
  const auto last = std::lower_bound(keys.begin(), keys.end(), hi) - keys.begin();
  return {static_cast<std::uint32_t>(first), static_cast<std::uint32_t>(last - first)};
}

Octree build_octree(std::vector<Particle> particles, const Domain& domain, int max_level) {
  if (particles.empty()) throw EmptyTreeError("build_octree: no particles");
  if (max_level < 0 || max_level > morton_max_level(domain.dim))
    throw CapacityError("build_octree: max_level beyond key capacity");

  Octree t;
  t.domain = domain;
  t.max_level = max_level;

  const std::size_t n = particles.size();
  std::vector<std::uint64_t> raw(n);
  for (std::size_t i = 0; i < n; ++i)
    raw[i] = morton_encode(particles[i].pos, domain, max_level).key;

  t.original.resize(n);
  std::iota(t.original.begin(), t.original.end(), 0u);
  std::sort(t.original.begin(), t.original.end(),
            [&](std::uint32_t a, std::uint32_t b) {
              return raw[a] != raw[b] ? raw[a] < raw[b] : a < b;
            });

  t.keys.resize(n);
  t.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.keys[i] = raw[t.original[i]];
    t.particles[i] = particles[t.original[i]];
  }

  // Leaf cells by one array traversal, interiors bottom-up by prefix merge.
  t.levels.resize(max_level + 1);
  auto& leaves = t.levels[max_level];
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && t.keys[j] == t.keys[i]) ++j;
    leaves.push_back(OctreeCell{t.keys[i], max_level, static_cast<std::uint32_t>(i),
                                static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  for (int l = max_level - 1; l >= 0; --l) {
    const auto& below = t.levels[l + 1];
    auto& cells = t.levels[l];
    for (std::size_t i = 0; i < below.size();) {
      const std::uint64_t prefix = below[i].key >> domain.dim;
      OctreeCell c{prefix, l, below[i].first, 0};
      while (i < below.size() && (below[i].key >> domain.dim) == prefix)
        c.count += below[i++].count;
      cells.push_back(c);
    }
  }
  return t;
}

}  // namespace apc
