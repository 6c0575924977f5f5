#include "apcloud/pic.hpp"

#include <algorithm>
#include <cmath>

namespace apc {

UniformGrid::UniformGrid(const Domain& dom, int cells) : dim(dom.dim), m(cells), domain(dom) {
  if (cells < 2) throw ConfigError("grid: need at least 2 cells per dimension");
  h = dom.edge(0) / m;
}

std::size_t UniformGrid::num_points() const {
  std::size_t n = 1;
  for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(m + 1);
  return n;
}

std::size_t UniformGrid::index(int i, int j, int k) const {
  const std::size_t p = m + 1;
  return dim == 2 ? static_cast<std::size_t>(j) * p + i
                  : (static_cast<std::size_t>(k) * p + j) * p + i;
}

Vec UniformGrid::point(int i, int j, int k) const {
  Vec p{domain.lo[0] + i * h, domain.lo[1] + j * h, 0.0};
  if (dim == 3) p[2] = domain.lo[2] + k * h;
  return p;
}

bool UniformGrid::is_boundary(int i, int j, int k) const {
  if (i == 0 || i == m || j == 0 || j == m) return true;
  return dim == 3 && (k == 0 || k == m);
}

namespace {

struct CicWeights {
  int base[3] = {0, 0, 0};
  double w[3][2] = {{0, 0}, {0, 0}, {0, 0}};
};

CicWeights cic_weights(const Vec& p, const UniformGrid& g) {
  CicWeights cw;
  for (int d = 0; d < g.dim; ++d) {
    const double s = (p[d] - g.domain.lo[d]) / g.h;
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, g.m - 1);
    const double f = s - i;
    cw.base[d] = i;
    cw.w[d][0] = 1.0 - f;
    cw.w[d][1] = f;
  }
  return cw;
}

template <class F>
void for_each_corner(const CicWeights& cw, int dim, F&& f) {
  const int kmax = dim == 3 ? 1 : 0;
  for (int ck = 0; ck <= kmax; ++ck)
    for (int cj = 0; cj <= 1; ++cj)
      for (int ci = 0; ci <= 1; ++ci) {
        double w = cw.w[0][ci] * cw.w[1][cj];
        if (dim == 3) w *= cw.w[2][ck];
        f(cw.base[0] + ci, cw.base[1] + cj, cw.base[2] + ck, w);
      }
}

}  // namespace

std::vector<double> cic_deposit(const std::vector<Particle>& particles, const UniformGrid& grid) {
  std::vector<double> rho(grid.num_points(), 0.0);
  const double cell_volume = std::pow(grid.h, grid.dim);
  for (const auto& p : particles) {
    if (!grid.domain.contains(p.pos)) throw OutOfDomainError("cic_deposit: particle outside domain");
    const CicWeights cw = cic_weights(p.pos, grid);
    for_each_corner(cw, grid.dim, [&](int i, int j, int k, double w) {
      rho[grid.index(i, j, k)] += p.charge * w / cell_volume;
    });
  }
  return rho;
}

std::vector<double> fd_poisson_solve(const UniformGrid& grid, const std::vector<double>& rho,
                                     const std::function<double(const Vec&)>& boundary_value,
                                     double tol, SolveReport* report) {
  const int n = static_cast<int>(grid.num_points());
  const double inv_h2 = 1.0 / (grid.h * grid.h);
  std::vector<std::pair<int, SparseRow>> rows;
  rows.reserve(n);
  std::vector<double> b(n, 0.0);

  const int kmax = grid.dim == 3 ? grid.m : 0;
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= grid.m; ++j)
      for (int i = 0; i <= grid.m; ++i) {
        const int row = static_cast<int>(grid.index(i, j, k));
        if (grid.is_boundary(i, j, k)) {
          rows.push_back({row, {{row, 1.0}}});
          b[row] = boundary_value(grid.point(i, j, k));
          continue;
        }
        SparseRow r;
        r.push_back({row, -2.0 * grid.dim * inv_h2});
        r.push_back({static_cast<int>(grid.index(i - 1, j, k)), inv_h2});
        r.push_back({static_cast<int>(grid.index(i + 1, j, k)), inv_h2});
        r.push_back({static_cast<int>(grid.index(i, j - 1, k)), inv_h2});
        r.push_back({static_cast<int>(grid.index(i, j + 1, k)), inv_h2});
        if (grid.dim == 3) {
          r.push_back({static_cast<int>(grid.index(i, j, k - 1)), inv_h2});
          r.push_back({static_cast<int>(grid.index(i, j, k + 1)), inv_h2});
        }
        rows.push_back({row, std::move(r)});
        b[row] = rho[row];
      }

  SparseSystem sys = assemble(rows, n);
  sys.rhs = b;
  return krylov_solve(sys, b, tol, 20000, report);
}

std::vector<std::vector<double>> grid_gradient(const UniformGrid& grid,
                                               const std::vector<double>& phi) {
  std::vector<std::vector<double>> grad(grid.dim, std::vector<double>(grid.num_points(), 0.0));
  const double inv2h = 1.0 / (2.0 * grid.h);
  const int m = grid.m;
  const int kmax = grid.dim == 3 ? m : 0;

  auto at = [&](int i, int j, int k) { return phi[grid.index(i, j, k)]; };
  for (int k = 0; k <= kmax; ++k)
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const std::size_t idx = grid.index(i, j, k);
        const int c[3] = {i, j, k};
        for (int d = 0; d < grid.dim; ++d) {
          auto shifted = [&](int off) {
            int s[3] = {c[0], c[1], c[2]};
            s[d] += off;
            return at(s[0], s[1], s[2]);
          };
          double v;
          if (c[d] == 0)
            v = (-3.0 * shifted(0) + 4.0 * shifted(1) - shifted(2)) * inv2h;
          else if (c[d] == m)
            v = (3.0 * shifted(0) - 4.0 * shifted(-1) + shifted(-2)) * inv2h;
          else
            v = (shifted(1) - shifted(-1)) * inv2h;
          grad[d][idx] = v;
        }
      }
  return grad;
}

std::vector<double> cic_gather(const UniformGrid& grid, const std::vector<double>& field,
                               const std::vector<Particle>& particles) {
  std::vector<double> out(particles.size(), 0.0);
  for (std::size_t pi = 0; pi < particles.size(); ++pi) {
    const CicWeights cw = cic_weights(particles[pi].pos, grid);
    double v = 0.0;
    for_each_corner(cw, grid.dim, [&](int i, int j, int k, double w) {
      v += w * field[grid.index(i, j, k)];
    });
    out[pi] = v;
  }
  return out;
}

PicSolution pic_solve(const std::vector<Particle>& particles, const Domain& domain, int m,
                      const std::function<double(const Vec&)>& boundary_value, double tol) {
  PicSolution sol{UniformGrid(domain, m), {}, {}, {}, {}, {}};
  sol.rho = cic_deposit(particles, sol.grid);
  sol.phi = fd_poisson_solve(sol.grid, sol.rho, boundary_value, tol);
  sol.E = grid_gradient(sol.grid, sol.phi);
  sol.phi_p = cic_gather(sol.grid, sol.phi, particles);
  sol.E_p.resize(domain.dim);
  for (int d = 0; d < domain.dim; ++d) sol.E_p[d] = cic_gather(sol.grid, sol.E[d], particles);
  return sol;
}

}  // namespace apc
