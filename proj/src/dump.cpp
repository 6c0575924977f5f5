#include "apcloud/csv.hpp"
#include "apcloud/pic.hpp"
#include "apcloud/solver.hpp"

namespace apc {

void dump_grid_csv(const PicSolution& sol, const std::string& path) {
  const UniformGrid& g = sol.grid;
  std::ofstream out = open_csv(path);
  out << (g.dim == 2 ? "i,j,x,y,rho,phi,Ex,Ey" : "i,j,k,x,y,z,rho,phi,Ex,Ey,Ez") << "\n";
  const int kmax = g.dim == 3 ? g.m : 0;
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= g.m; ++j)
      for (int i = 0; i <= g.m; ++i) {
        const std::size_t idx = g.index(i, j, k);
        const Vec p = g.point(i, j, k);
        out << i << "," << j;
        if (g.dim == 3) out << "," << k;
        for (int d = 0; d < g.dim; ++d) out << "," << fmt17(p[d]);
        out << "," << fmt17(sol.rho[idx]) << "," << fmt17(sol.phi[idx]);
        for (int d = 0; d < g.dim; ++d) out << "," << fmt17(sol.E[d][idx]);
        out << "\n";
      }
  if (!out) throw IoError("write failed: " + path);
}

void dump_nodes_csv(const FieldSolution& sol, const std::string& path) {
  const int dim = sol.nodes.dim;
  std::ofstream out = open_csv(path);
  out << (dim == 2 ? "x,y,h,rho,phi,Ex,Ey" : "x,y,z,h,rho,phi,Ex,Ey,Ez") << "\n";
  for (std::size_t i = 0; i < sol.nodes.size(); ++i) {
    for (int d = 0; d < dim; ++d) out << (d ? "," : "") << fmt17(sol.nodes.pos[i][d]);
    out << "," << fmt17(sol.nodes.h[i]) << "," << fmt17(sol.rho[i]) << "," << fmt17(sol.phi[i]);
    for (int d = 0; d < dim; ++d) out << "," << fmt17(sol.E[d][i]);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

void dump_particles_csv(const FieldSolution& sol, const Octree& tree, const std::string& path) {
  const int dim = sol.nodes.dim;
  std::ofstream out = open_csv(path);
  out << (dim == 2 ? "x,y,phi,Ex,Ey" : "x,y,z,phi,Ex,Ey,Ez") << "\n";
  for (std::size_t i = 0; i < tree.particles.size(); ++i) {
    for (int d = 0; d < dim; ++d) out << (d ? "," : "") << fmt17(tree.particles[i].pos[d]);
    out << "," << fmt17(sol.phi_p[i]);
    for (int d = 0; d < dim; ++d) out << "," << fmt17(sol.E_p[d][i]);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace apc
