#include "apcloud/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace apc {

namespace {

double nrm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<double> jacobi_scale(const SparseSystem& a) {
  std::vector<double> inv_diag(a.n, 1.0);
  for (int i = 0; i < a.n; ++i)
    for (int k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (a.col[k] == i && a.val[k] != 0.0) inv_diag[i] = 1.0 / a.val[k];
  return inv_diag;
}

double true_residual(const SparseSystem& a, const std::vector<double>& x,
                     const std::vector<double>& b, double bnorm) {
  auto ax = a.apply(x);
  double s = 0.0;
  for (int i = 0; i < a.n; ++i) {
    const double r = ax[i] - b[i];
    s += r * r;
  }
  return std::sqrt(s) / bnorm;
}

bool bicgstab(const SparseSystem& a, const std::vector<double>& b,
              const std::vector<double>& inv_diag, double tol, int max_iter,
              std::vector<double>& x, int& iters) {
  const int n = a.n;
  const double bnorm = nrm2(b);
  std::vector<double> r = b;  // x0 = 0
  std::vector<double> rhat = r;
  std::vector<double> p(n, 0.0), v(n, 0.0), phat(n), shat(n), s(n), t(n);
  double rho = 1.0, alpha = 1.0, omega = 1.0;

  for (iters = 0; iters < max_iter; ++iters) {
    const double rho1 = dotv(rhat, r);
    if (rho1 == 0.0) return false;  // breakdown
    if (iters == 0) {
      p = r;
    } else {
      if (omega == 0.0) return false;
      const double beta = (rho1 / rho) * (alpha / omega);
      for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho1;
    for (int i = 0; i < n; ++i) phat[i] = inv_diag[i] * p[i];
    v = a.apply(phat);
    const double rv = dotv(rhat, v);
    if (rv == 0.0) return false;
    alpha = rho1 / rv;
    for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    if (nrm2(s) / bnorm <= tol) {
      for (int i = 0; i < n; ++i) x[i] += alpha * phat[i];
      return true;
    }
    for (int i = 0; i < n; ++i) shat[i] = inv_diag[i] * s[i];
    t = a.apply(shat);
    const double tt = dotv(t, t);
    if (tt == 0.0) return false;
    omega = dotv(t, s) / tt;
    for (int i = 0; i < n; ++i) x[i] += alpha * phat[i] + omega * shat[i];
    for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    if (nrm2(r) / bnorm <= tol && true_residual(a, x, b, bnorm) <= tol) return true;
  }
  return false;
}

// Restarted GMRES with right diagonal preconditioning.
bool gmres(const SparseSystem& a, const std::vector<double>& b,
           const std::vector<double>& inv_diag, double tol, int max_iter,
           std::vector<double>& x, int& iters) {
  const int n = a.n;
  const int restart = std::min(200, std::max(30, n));
  const double bnorm = nrm2(b);
  iters = 0;

  while (iters < max_iter) {
    auto ax = a.apply(x);
    std::vector<double> r(n);
    for (int i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    double beta = nrm2(r);
    if (beta / bnorm <= tol) return true;

    std::vector<std::vector<double>> v;
    v.push_back(r);
    for (int i = 0; i < n; ++i) v[0][i] /= beta;
    std::vector<std::vector<double>> h;  // h[j] holds column j (j+2 entries)
    std::vector<double> cs, sn, g;
    g.push_back(beta);

    int j = 0;
    for (; j < restart && iters < max_iter; ++j, ++iters) {
      std::vector<double> w(n);
      for (int i = 0; i < n; ++i) w[i] = inv_diag[i] * v[j][i];
      w = a.apply(w);
      std::vector<double> hj(j + 2, 0.0);
      for (int k = 0; k <= j; ++k) {  // modified Gram-Schmidt
        hj[k] = dotv(w, v[k]);
        for (int i = 0; i < n; ++i) w[i] -= hj[k] * v[k][i];
      }
      hj[j + 1] = nrm2(w);
      const double wnorm = hj[j + 1];
      for (int k = 0; k < j; ++k) {  // apply stored Givens rotations
        const double tmp = cs[k] * hj[k] + sn[k] * hj[k + 1];
        hj[k + 1] = -sn[k] * hj[k] + cs[k] * hj[k + 1];
        hj[k] = tmp;
      }
      double c, s;
      const double denom = std::hypot(hj[j], hj[j + 1]);
      if (denom == 0.0) {
        c = 1.0;
        s = 0.0;
      } else {
        c = hj[j] / denom;
        s = hj[j + 1] / denom;
      }
      cs.push_back(c);
      sn.push_back(s);
      hj[j] = c * hj[j] + s * hj[j + 1];
      hj[j + 1] = 0.0;
      g.push_back(-s * g[j]);
      g[j] = c * g[j];
      h.push_back(std::move(hj));

      const bool happy = (wnorm == 0.0);
      if (std::abs(g[j + 1]) / bnorm <= tol || happy || j + 1 == restart) {
        // back-substitute and update x
        std::vector<double> y(j + 1, 0.0);
        for (int k = j; k >= 0; --k) {
          double sum = g[k];
          for (int l = k + 1; l <= j; ++l) sum -= h[l][k] * y[l];
          y[k] = sum / h[k][k];
        }
        for (int k = 0; k <= j; ++k)
          for (int i = 0; i < n; ++i) x[i] += inv_diag[i] * y[k] * v[k][i];
        if (std::abs(g[j + 1]) / bnorm <= tol || happy) {
          if (true_residual(a, x, b, bnorm) <= tol) return true;
        }
        break;  // restart
      }
      for (int i = 0; i < n; ++i) w[i] /= wnorm;
      v.push_back(std::move(w));
    }
  }
  return false;
}

}  // namespace

std::vector<double> SparseSystem::apply(const std::vector<double>& x) const {
  std::vector<double> y(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
  return y;
}

void SparseSystem::dump_coordinate(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw IoError("cannot open " + path);
  for (int i = 0; i < n; ++i)
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      std::fprintf(f, "%d %d %.17g\n", i, col[k], val[k]);
  std::fclose(f);
}

SparseSystem assemble(const std::vector<std::pair<int, SparseRow>>& rows, int n) {
  std::vector<SparseRow> merged(n);
  for (const auto& [i, entries] : rows) {
    if (i < 0 || i >= n) throw Error("assemble: row index " + std::to_string(i) + " out of range");
    for (const auto& [j, v] : entries) {
      if (j < 0 || j >= n)
        throw Error("assemble: column index " + std::to_string(j) + " out of range");
      merged[i].emplace_back(j, v);
    }
  }
  SparseSystem a;
  a.n = n;
  a.row_ptr.assign(n + 1, 0);
  a.rhs.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto& row = merged[i];
    std::sort(row.begin(), row.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::size_t w = 0;
    for (std::size_t r = 0; r < row.size();) {
      int j = row[r].first;
      double sum = 0.0;
      while (r < row.size() && row[r].first == j) sum += row[r++].second;
      if (sum != 0.0) row[w++] = {j, sum};
    }
    row.resize(w);
    for (const auto& [j, v] : row) {
      a.col.push_back(j);
      a.val.push_back(v);
    }
    a.row_ptr[i + 1] = static_cast<int>(a.col.size());
  }
  return a;
}

std::vector<double> krylov_solve(const SparseSystem& system, const std::vector<double>& b,
                                 double tol, int max_iter, SolveReport* report) {
  if (system.n != static_cast<int>(b.size())) throw Error("krylov_solve: dimension mismatch");
  if (tol <= 0.0) throw Error("krylov_solve: tol must be positive");

  std::vector<double> x(system.n, 0.0);
  const double bnorm = nrm2(b);
  if (bnorm == 0.0) {
    if (report) *report = SolveReport{0, 0.0, "bicgstab"};
    return x;
  }

  const auto inv_diag = jacobi_scale(system);
  int iters = 0;
  if (bicgstab(system, b, inv_diag, tol, max_iter, x, iters)) {
    if (report) *report = SolveReport{iters, true_residual(system, x, b, bnorm), "bicgstab"};
    return x;
  }
  std::fill(x.begin(), x.end(), 0.0);
  int g_iters = 0;
  if (gmres(system, b, inv_diag, tol, max_iter, x, g_iters)) {
    if (report)
      *report = SolveReport{iters + g_iters, true_residual(system, x, b, bnorm), "gmres"};
    return x;
  }
  throw NonConvergenceError("krylov_solve: no convergence after " +
                            std::to_string(iters + g_iters) + " iterations, residual " +
                            std::to_string(true_residual(system, x, b, bnorm)));
}

}  // namespace apc
