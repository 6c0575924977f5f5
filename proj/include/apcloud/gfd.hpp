#pragma once

#include <span>
#include <vector>

#include "apcloud/core.hpp"

namespace apc {

enum class WeightForm {
  Normalized,  // exp(-c r^2/r_max^2) scaled to reach 0 at r_max, c = 4
  Literal,     // exp(-r^2/r_max^2) variant with the same affine scaling
};

double gaussian_weight(double r, double r_max, WeightForm form = WeightForm::Normalized);

// Monomial exponents for total degrees 1..k in graded order; within a degree
// the exponents are ordered so that for k = 2 the second-degree block matches
// the upper-triangular Hessian laid out row-major.
struct Monomial {
  std::array<int, 3> exp{0, 0, 0};
  int degree = 0;
  double inv_factorial = 1.0;  // 1/prod(exp_d!)
};
const std::vector<Monomial>& monomial_basis(int dim, int k);

inline int n_coeffs(int dim, int k) { return static_cast<int>(monomial_basis(dim, k).size()); }

// Derivatives of a scalar field at a node: gradient entries first, then the
// upper-triangular Hessian row-major (plain derivatives, no factorials).
struct DerivativeVector {
  int dim = 2;
  int k = 2;
  std::vector<double> v;

  double grad(int d) const { return v[d]; }
  double hess(int d1, int d2) const;  // symmetric lookup, k >= 2
};

struct ScaledVandermonde {
  int dim = 2;
  int k = 2;
  int rows = 0, cols = 0;
  double h = 0.0;               // max coordinate offset over neighbors
  std::vector<double> a;        // row-major rows x cols
  double& at(int i, int j) { return a[i * cols + j]; }
  double at(int i, int j) const { return a[i * cols + j]; }
};

ScaledVandermonde build_scaled_vandermonde(const Vec& center, std::span<const Vec> neighbors,
                                           int dim, int k);

// Per-node weighted-least-squares derivative operator. Applying `dweights` to
// the neighbor increments f(y^j) - f(y^0) yields the unscaled derivatives in
// DerivativeVector order.
struct GfdStencil {
  int center = -1;              // node index (bookkeeping only)
  std::vector<int> neighbors;   // node indices matching the weight columns
  double h = 0.0;
  std::vector<double> xi;       // scaled offsets, m x dim row-major
  std::vector<double> weights;  // Gaussian weights per neighbor
  std::vector<double> dweights; // n_coeffs x m row-major
  int dim = 2;
  int k = 2;

  DerivativeVector apply(std::span<const double> increments) const;

  // Laplacian as (coefficients on neighbors, coefficient on center).
  std::pair<std::vector<double>, double> laplacian_row() const;
  // Same for one first-derivative direction.
  std::pair<std::vector<double>, double> gradient_row(int d) const;
};

// Weighted least-squares fit; throws DegenerateStencilError for coincident
// stencils and IllConditionedStencilError when the (weighted) Vandermonde
// condition estimate exceeds 10^12.
std::vector<double> wls_derivative_weights(const ScaledVandermonde& v0,
                                           std::span<const double> weights, double h);

GfdStencil build_stencil(const Vec& center, std::span<const Vec> neighbor_pos, int dim, int k,
                         WeightForm form = WeightForm::Normalized);

double taylor_interpolate(const Vec& target, const Vec& node, double value,
                          const DerivativeVector& derivs, int k);

}  // namespace apc
