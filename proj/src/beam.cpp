#include "apcloud/beam.hpp"

#include <cmath>
#include <random>

namespace apc {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrtHalfPi = 1.2533141373155003;  // sqrt(pi/2)

// Uniform double in [0,1) with 53 random bits; fixed construction keeps the
// sampler bitwise reproducible across standard library implementations.
double canonical(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; one normal deviate per call, caching the partner.
class NormalSource {
 public:
  explicit NormalSource(std::mt19937_64& rng) : rng_(rng) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 == 0.0) u1 = canonical(rng_);
    const double u2 = canonical(rng_);
    const double mag = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    spare_ = mag * std::sin(ang);
    have_spare_ = true;
    return mag * std::cos(ang);
  }

 private:
  std::mt19937_64& rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace

void BeamParams::validate() const {
  if (tau1 <= 0.0 || tau2 <= 0.0) throw ConfigError("beam: tau1, tau2 must be positive");
  if (a2 < 0.0) throw ConfigError("beam: a2 must be non-negative");
  if (a1 <= 0.0) throw ConfigError("beam: a1 must be positive");
  if (dim != 2 && dim != 3) throw ConfigError("beam: dim must be 2 or 3");
}

double gauss_line_integral(double a, double b, double c, double tau) {
  const double s = kSqrt2 * tau;
  return tau * kSqrtHalfPi * (std::erf((b - c) / s) - std::erf((a - c) / s));
}

double component_mass(double tau, const Domain& domain, const Vec& center) {
  double m = 1.0;
  for (int d = 0; d < domain.dim; ++d)
    m *= gauss_line_integral(domain.lo[d], domain.hi[d], center[d], tau);
  return m;
}

double normalize(BeamParams& params, const Domain& domain) {
  const double a1_in = params.a1;
  const double mass_per_a1 =
      component_mass(params.tau1, domain, {0, 0, 0}) +
      params.a2 * component_mass(params.tau2, domain, {0, 0, 0});
  params.a1 = 1.0 / mass_per_a1;
  return std::abs(params.a1 - a1_in) / params.a1;
}

BeamParams benchmark_beam(int dim) {
  BeamParams p;
  p.dim = dim;
  p.tau1 = 0.02;
  p.tau2 = 0.3;
  p.a2 = 1e-5;
  p.a1 = (dim == 2) ? 396.1 : 7677.0;
  normalize(p, Domain::unit_box(dim));
  return p;
}

double density_exact(const Vec& x, const BeamParams& params, const Vec& center) {
  double r2 = 0.0;
  for (int d = 0; d < params.dim; ++d) {
    const double t = x[d] - center[d];
    r2 += t * t;
  }
  return params.a1 * (std::exp(-r2 / (2.0 * params.tau1 * params.tau1)) +
                      params.a2 * std::exp(-r2 / (2.0 * params.tau2 * params.tau2)));
}

double density_cell_average(const BeamParams& params, const Vec& cell_lo, const Vec& cell_hi,
                            const Domain& domain, const Vec& center) {
  double vol = 1.0, i1 = 1.0, i2 = 1.0;
  for (int d = 0; d < params.dim; ++d) {
    vol *= cell_hi[d] - cell_lo[d];
    i1 *= gauss_line_integral(cell_lo[d], cell_hi[d], center[d], params.tau1);
    i2 *= gauss_line_integral(cell_lo[d], cell_hi[d], center[d], params.tau2);
  }
  return params.a1 * (i1 + params.a2 * i2) / vol;
}

std::vector<Particle> sample_gaussian_beam(const BeamParams& params, std::size_t n,
                                           std::uint64_t seed, const Domain& domain,
                                           const Vec& center) {
  params.validate();
  std::vector<Particle> out;
  if (n == 0) return out;
  out.reserve(n);

  // Component weights use the untruncated masses: rejected draws restart from
  // the component choice, which restricts the full mixture to the box exactly.
  const double m1 = std::pow(params.tau1, params.dim);
  const double m2 = params.a2 * std::pow(params.tau2, params.dim);
  const double p_core = m1 / (m1 + m2);

  std::mt19937_64 rng(seed);
  NormalSource normal(rng);
  const double q = 1.0 / static_cast<double>(n);

  while (out.size() < n) {
    const double tau = (canonical(rng) < p_core) ? params.tau1 : params.tau2;
    Vec x{0, 0, 0};
    for (int d = 0; d < params.dim; ++d) x[d] = center[d] + tau * normal.next();
    if (!domain.contains(x)) continue;  // rejection keeps the truncated law exact
    out.push_back(Particle{x, q});
  }
  return out;
}

}  // namespace apc
