#include "optomech/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

double explicit_sum(const PhononDistribution& d, auto weight) {
  double s = 0.0;
  const auto& p = d.explicit_p();
  for (std::size_t n = 0; n < p.size(); ++n) s += weight(static_cast<double>(n), p[n]);
  return s;
}

// sum_n a_n b_n over all levels, tails included.
double overlap(const PhononDistribution& a, const PhononDistribution& b) {
  const std::size_t m = std::max(a.size(), b.size());
  double s = 0.0;
  for (std::size_t n = 0; n < m; ++n) s += a[n] * b[n];
  if (a.tail() && b.tail()) {
    const double r = a.tail()->ratio * b.tail()->ratio;
    s += a.tail()->amplitude * b.tail()->amplitude * std::pow(r, static_cast<double>(m)) / (1.0 - r);
  }
  return s;
}

}  // namespace

AnalyticPopulations analytic_populations(const SelectiveDamping& s, std::size_t n_c) {
  if (n_c < s.j + 2) {
    throw InvalidSpaceError("analytic populations need n_c >= j + 2 explicit levels");
  }
  if (!(s.gamma_p >= 0.0) || !(s.nbar_p >= 0.0) || !(s.rate >= 0.0)) {
    throw ParameterError("rates and occupation must be non-negative");
  }
  const double nb = s.nbar_p;
  const double zeta1 = nb / (nb + 1.0);
  const double eps_j = s.rate / (nb + 1.0);
  const double pump = s.gamma_p * static_cast<double>(s.j + 1);
  if (pump + eps_j == 0.0) throw DegenerateError("gamma_p (j+1) + eps_j vanishes");
  const double varpi = pump / (pump + eps_j);
  const double zeta_j1 = std::pow(zeta1, static_cast<double>(s.j + 1));
  const double rho00 = 1.0 / ((nb + 1.0) * (1.0 - zeta_j1 + varpi * zeta_j1));

  std::vector<double> p(n_c);
  for (std::size_t n = 0; n < n_c; ++n) {
    const double zeta_n = std::pow(zeta1, static_cast<double>(n));
    p[n] = n <= s.j ? zeta_n * rho00 : zeta_n * varpi * rho00;
  }
  GeometricTail tail{n_c, rho00 * varpi, zeta1};
  return AnalyticPopulations{PhononDistribution(std::move(p), tail), zeta1, varpi, eps_j, rho00};
}

AnalyticPopulations analytic_populations(const SystemParams& p, std::size_t j, std::size_t n_c,
                                         const SeriesControl& ctrl) {
  return analytic_populations(selective_damping(p, j, ctrl), n_c);
}

double laguerre(std::size_t n, double x) {
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 - x;
  for (std::size_t k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk + 1.0 - x) * cur - kk * prev) / (kk + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

GridSpec default_grid(const PhononDistribution& dist) {
  double half = std::max(5.0, 3.0 * std::sqrt(mean_phonon(dist) + 1.0));
  if (dist.tail() && dist.tail()->mass() > 1e-6) {
    const double r = dist.tail()->ratio;
    half = std::max(half, 3.0 * std::sqrt(r / (1.0 - r) + 1.0));
  }
  return GridSpec{-half, half, -half, half, 201, 201};
}

double WignerGrid::min_value() const { return *std::min_element(values.begin(), values.end()); }

namespace {

// e^{-x/2} sum_n (-1)^n p_n L_n(x), with the recurrence run on e^{-x/2} L_n so
// every intermediate stays bounded by 1.
double weighted_laguerre_sum(const std::vector<double>& p, double x) {
  double prev = std::exp(-0.5 * x);
  double s = p.empty() ? 0.0 : p[0] * prev;
  if (p.size() < 2) return s;
  double cur = (1.0 - x) * prev;
  s -= p[1] * cur;
  for (std::size_t k = 1; k + 1 < p.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double next = ((2.0 * kk + 1.0 - x) * cur - kk * prev) / (kk + 1.0);
    prev = cur;
    cur = next;
    s += (k + 1) % 2 == 0 ? p[k + 1] * cur : -p[k + 1] * cur;
  }
  return s;
}

}  // namespace

double wigner_point(const PhononDistribution& dist, double x, double y) {
  const std::vector<double> p = dist.materialize();
  return 2.0 / std::numbers::pi * weighted_laguerre_sum(p, 4.0 * (x * x + y * y));
}

WignerGrid wigner(const PhononDistribution& dist, const GridSpec& spec) {
  if (spec.nx < 2 || spec.ny < 2 || !(spec.xmax > spec.xmin) || !(spec.ymax > spec.ymin)) {
    throw ParameterError("Wigner grid needs nx, ny >= 2 and increasing bounds");
  }
  const std::vector<double> p = dist.materialize();
  WignerGrid g;
  const double hx = (spec.xmax - spec.xmin) / static_cast<double>(spec.nx - 1);
  const double hy = (spec.ymax - spec.ymin) / static_cast<double>(spec.ny - 1);
  g.x.resize(spec.nx);
  g.y.resize(spec.ny);
  for (std::size_t i = 0; i < spec.nx; ++i) g.x[i] = spec.xmin + hx * static_cast<double>(i);
  for (std::size_t i = 0; i < spec.ny; ++i) g.y[i] = spec.ymin + hy * static_cast<double>(i);
  g.x.back() = spec.xmax;
  g.y.back() = spec.ymax;

  g.values.resize(spec.nx * spec.ny);
  double mass = 0.0;
  for (std::size_t iy = 0; iy < spec.ny; ++iy) {
    const double wy = (iy == 0 || iy + 1 == spec.ny) ? 0.5 * hy : hy;
    for (std::size_t ix = 0; ix < spec.nx; ++ix) {
      const double wx = (ix == 0 || ix + 1 == spec.nx) ? 0.5 * hx : hx;
      const double r2 = g.x[ix] * g.x[ix] + g.y[iy] * g.y[iy];
      const double w = 2.0 / std::numbers::pi * weighted_laguerre_sum(p, 4.0 * r2);
      g.values[iy * spec.nx + ix] = w;
      mass += wx * wy * w;
    }
  }
  g.mass = mass;
  g.coverage_ok = std::abs(mass - 1.0) <= 1e-4;
  return g;
}

PhononDistribution thermal_reference(double nbar, std::size_t n_c) {
  if (!(nbar >= 0.0)) throw ParameterError("thermal occupation must be >= 0");
  if (n_c < 1) throw InvalidSpaceError("thermal reference needs at least one explicit level");
  const double r = nbar / (nbar + 1.0);
  const double k = 1.0 / (nbar + 1.0);
  std::vector<double> p(n_c);
  for (std::size_t n = 0; n < n_c; ++n) p[n] = k * std::pow(r, static_cast<double>(n));
  return PhononDistribution(std::move(p), GeometricTail{n_c, k, r});
}

double mean_phonon(const PhononDistribution& dist) {
  double m = explicit_sum(dist, [](double n, double p) { return n * p; });
  if (dist.tail()) m += dist.tail()->first_moment();
  return m;
}

double non_gaussianity_fock(const PhononDistribution& dist) {
  double s = explicit_sum(dist, [](double, double p) { return p > 0.0 ? p * std::log(p) : 0.0; });
  if (dist.tail()) s += dist.tail()->entropy_sum();
  const double nb = mean_phonon(dist);
  const double ref = (nb + 1.0) * std::log(nb + 1.0) - (nb > 0.0 ? nb * std::log(nb) : 0.0);
  const double delta = s + ref;
  return (delta < 0.0 && delta > -1e-12) ? 0.0 : delta;
}

double non_gaussianity_hs(const PhononDistribution& rho, const PhononDistribution& rho_g) {
  const double purity = overlap(rho, rho);
  return 0.5 * (1.0 + (overlap(rho_g, rho_g) - 2.0 * overlap(rho_g, rho)) / purity);
}

double non_gaussianity_hs(const DensityMatrix& rho, const PhononDistribution& rho_g) {
  if (rho.dims().size() != 1) throw ShapeError("Hilbert-Schmidt non-Gaussianity needs a single mode");
  const double purity = rho.matrix().squaredNorm();
  double cross = 0.0;
  for (std::size_t n = 0; n < rho.dim(); ++n) {
    const auto i = static_cast<Eigen::Index>(n);
    cross += rho_g[n] * rho.matrix()(i, i).real();
  }
  return 0.5 * (1.0 + (overlap(rho_g, rho_g) - 2.0 * cross) / purity);
}

double g2_zero(const PhononDistribution& dist) {
  const double nb = mean_phonon(dist);
  if (!(nb > 0.0)) throw UndefinedCorrelationError("g2(0) is undefined for zero mean occupation");
  double f = explicit_sum(dist, [](double n, double p) { return n * (n - 1.0) * p; });
  if (dist.tail()) f += dist.tail()->factorial_moment();
  return f / (nb * nb);
}

double total_variation(const PhononDistribution& a, const PhononDistribution& b) {
  const std::vector<double> pa = a.materialize();
  const std::vector<double> pb = b.materialize();
  const std::size_t m = std::max(pa.size(), pb.size());
  double s = 0.0;
  for (std::size_t n = 0; n < m; ++n) {
    s += std::abs((n < pa.size() ? pa[n] : 0.0) - (n < pb.size() ? pb[n] : 0.0));
  }
  return 0.5 * s;
}

}  // namespace optomech
