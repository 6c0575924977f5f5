#include "apcloud/gfd.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>

namespace apc {

namespace {
constexpr double kWeightC = 4.0;
constexpr double kCondLimit = 1e12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}
}  // namespace

double gaussian_weight(double r, double r_max, WeightForm form) {
  if (r_max <= 0.0) throw Error("gaussian_weight: r_max must be positive");
  if (r < 0.0 || r > r_max) throw Error("gaussian_weight: r outside [0, r_max]");
  const double emc = std::exp(-kWeightC);
  const double t = r / r_max;
  const double e = (form == WeightForm::Normalized) ? std::exp(-kWeightC * t * t)
                                                    : std::exp(-t * t);
  return (e - emc) / (1.0 - emc);
}

const std::vector<Monomial>& monomial_basis(int dim, int k) {
  static std::map<std::pair<int, int>, std::vector<Monomial>> cache;
  auto it = cache.find({dim, k});
  if (it != cache.end()) return it->second;

  std::vector<Monomial> basis;
  for (int g = 1; g <= k; ++g) {
    // exponent tuples of total degree g, leading dimensions first
    std::array<int, 3> e{0, 0, 0};
    if (dim == 2) {
      for (int e0 = g; e0 >= 0; --e0) {
        e = {e0, g - e0, 0};
        basis.push_back({e, g, 1.0 / (factorial(e[0]) * factorial(e[1]))});
      }
    } else {
      for (int e0 = g; e0 >= 0; --e0)
        for (int e1 = g - e0; e1 >= 0; --e1) {
          e = {e0, e1, g - e0 - e1};
          basis.push_back({e, g, 1.0 / (factorial(e[0]) * factorial(e[1]) * factorial(e[2]))});
        }
    }
  }
  return cache.emplace(std::make_pair(dim, k), std::move(basis)).first->second;
}

double DerivativeVector::hess(int d1, int d2) const {
  if (d1 > d2) std::swap(d1, d2);
  const int idx = dim + d1 * dim - d1 * (d1 - 1) / 2 + (d2 - d1);
  return v[idx];
}

ScaledVandermonde build_scaled_vandermonde(const Vec& center, std::span<const Vec> neighbors,
                                           int dim, int k) {
  if (neighbors.empty()) throw DegenerateStencilError("stencil has no neighbors");
  const auto& basis = monomial_basis(dim, k);
  ScaledVandermonde v0;
  v0.dim = dim;
  v0.k = k;
  v0.rows = static_cast<int>(neighbors.size());
  v0.cols = static_cast<int>(basis.size());
  v0.a.assign(static_cast<std::size_t>(v0.rows) * v0.cols, 0.0);

  double h = 0.0;
  for (const auto& y : neighbors)
    for (int d = 0; d < dim; ++d) h = std::max(h, std::abs(y[d] - center[d]));
  if (h == 0.0) throw DegenerateStencilError("all stencil neighbors coincide with the center");
  v0.h = h;

  for (int j = 0; j < v0.rows; ++j) {
    Vec xi{0, 0, 0};
    for (int d = 0; d < dim; ++d) xi[d] = (neighbors[j][d] - center[d]) / h;
    for (int c = 0; c < v0.cols; ++c) {
      double term = basis[c].inv_factorial;
      for (int d = 0; d < dim; ++d)
        for (int p = 0; p < basis[c].exp[d]; ++p) term *= xi[d];
      v0.at(j, c) = term;
    }
  }
  return v0;
}

std::vector<double> wls_derivative_weights(const ScaledVandermonde& v0,
                                           std::span<const double> weights, double h) {
  const int m = v0.rows;
  const int c = v0.cols;
  if (m < c) throw DegenerateStencilError("stencil smaller than the derivative basis");

  Eigen::MatrixXd a(m, c);
  Eigen::VectorXd sw(m);
  for (int j = 0; j < m; ++j) {
    sw(j) = std::sqrt(weights[j]);
    for (int i = 0; i < c; ++i) a(j, i) = sw(j) * v0.at(j, i);
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  const auto& r = qr.matrixR();
  const double rmax = std::abs(r(0, 0));
  const double rmin = std::abs(r(c - 1, c - 1));
  if (rmin == 0.0 || rmax / rmin > kCondLimit)
    throw IllConditionedStencilError("stencil condition estimate exceeds 1e12");

  // Solve against the weighted identity to get the map increments -> derivs.
  Eigen::MatrixXd rhs = sw.asDiagonal();
  Eigen::MatrixXd x = qr.solve(rhs);  // c x m

  const auto& basis = monomial_basis(v0.dim, v0.k);
  std::vector<double> d(static_cast<std::size_t>(c) * m);
  for (int i = 0; i < c; ++i) {
    const double scale = std::pow(h, basis[i].degree);
    for (int j = 0; j < m; ++j) d[static_cast<std::size_t>(i) * m + j] = x(i, j) / scale;
  }
  return d;
}

GfdStencil build_stencil(const Vec& center, std::span<const Vec> neighbor_pos, int dim, int k,
                         WeightForm form) {
  GfdStencil s;
  s.dim = dim;
  s.k = k;
  auto v0 = build_scaled_vandermonde(center, neighbor_pos, dim, k);
  s.h = v0.h;

  const int m = v0.rows;
  double r_max = 0.0;
  std::vector<double> r(m);
  for (int j = 0; j < m; ++j) {
    r[j] = norm(neighbor_pos[j] - center);
    r_max = std::max(r_max, r[j]);
  }
  // support slightly beyond the farthest neighbor so its weight stays positive
  const double r_support = 1.1 * r_max;
  s.weights.resize(m);
  for (int j = 0; j < m; ++j) s.weights[j] = gaussian_weight(r[j], r_support, form);

  s.xi.resize(static_cast<std::size_t>(m) * dim);
  for (int j = 0; j < m; ++j)
    for (int d = 0; d < dim; ++d) s.xi[j * dim + d] = (neighbor_pos[j][d] - center[d]) / s.h;

  s.dweights = wls_derivative_weights(v0, s.weights, s.h);
  return s;
}

DerivativeVector GfdStencil::apply(std::span<const double> increments) const {
  const int c = n_coeffs(dim, k);
  const int m = static_cast<int>(increments.size());
  DerivativeVector out;
  out.dim = dim;
  out.k = k;
  out.v.assign(c, 0.0);
  for (int i = 0; i < c; ++i) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) s += dweights[static_cast<std::size_t>(i) * m + j] * increments[j];
    out.v[i] = s;
  }
  return out;
}

std::pair<std::vector<double>, double> GfdStencil::laplacian_row() const {
  const auto& basis = monomial_basis(dim, k);
  const int m = static_cast<int>(weights.size());
  std::vector<double> row(m, 0.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    bool is_pure_second = basis[i].degree == 2;
    if (is_pure_second)
      for (int d = 0; d < dim; ++d)
        if (basis[i].exp[d] == 1) is_pure_second = false;
    if (!is_pure_second) continue;
    for (int j = 0; j < m; ++j) row[j] += dweights[i * m + j];
  }
  double center_coeff = 0.0;
  for (double v : row) center_coeff -= v;
  return {std::move(row), center_coeff};
}

std::pair<std::vector<double>, double> GfdStencil::gradient_row(int d) const {
  const int m = static_cast<int>(weights.size());
  std::vector<double> row(m);
  for (int j = 0; j < m; ++j) row[j] = dweights[static_cast<std::size_t>(d) * m + j];
  double center_coeff = 0.0;
  for (double v : row) center_coeff -= v;
  return {std::move(row), center_coeff};
}

double taylor_interpolate(const Vec& target, const Vec& node, double value,
                          const DerivativeVector& derivs, int k) {
  const auto& basis = monomial_basis(derivs.dim, k);
  const Vec delta = target - node;
  double out = value;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    double term = basis[i].inv_factorial * derivs.v[i];
    for (int d = 0; d < derivs.dim; ++d)
      for (int p = 0; p < basis[i].exp[d]; ++p) term *= delta[d];
    out += term;
  }
  return out;
}

}  // namespace apc
