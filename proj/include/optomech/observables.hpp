#pragma once

// Quantities evaluated on the stationary phonon state.

#include <cstddef>
#include <string>
#include <vector>

#include "optomech/fock.hpp"
#include "optomech/model.hpp"
#include "optomech/phonon.hpp"

namespace optomech {

// Closed-form stationary populations of the engineered master equation:
//   rho_nn = zeta_n rho_00 (n <= j),  zeta_n varpi_j rho_00 (n > j)
//   zeta_n = (nbar/(nbar+1))^n,  varpi_j = gamma (j+1) / (gamma (j+1) + eps_j)
//   eps_j = Gamma_j / (nbar+1),  rho_00 = 1 / ((nbar+1)(1 - zeta_{j+1} + varpi_j zeta_{j+1}))
// Levels >= n_c are carried by an analytic geometric tail. Requires n_c >= j + 2.
struct AnalyticPopulations {
  PhononDistribution dist;
  double zeta1;
  double varpi;
  double eps_j;
  double rho00;
};

AnalyticPopulations analytic_populations(const SelectiveDamping& s, std::size_t n_c);
AnalyticPopulations analytic_populations(const SystemParams& p, std::size_t j, std::size_t n_c,
                                         const SeriesControl& ctrl = {});

// Laguerre polynomial by three-term recurrence.
double laguerre(std::size_t n, double x);

struct GridSpec {
  double xmin = -4.0;
  double xmax = 4.0;
  double ymin = -4.0;
  double ymax = 4.0;
  std::size_t nx = 201;
  std::size_t ny = 201;
};

// 201 x 201 square grid of half-width max(5, 3 sqrt(nbar+1)), widened to
// 3 sqrt(n_tail+1) when the geometric tail (thermal occupancy n_tail) holds
// more than 1e-6 of the mass.
GridSpec default_grid(const PhononDistribution& dist);

struct WignerGrid {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> values;  // values[iy * x.size() + ix]
  double mass = 0.0;           // trapezoidal integral over the grid
  bool coverage_ok = true;     // |mass - 1| <= 1e-4
  double at(std::size_t ix, std::size_t iy) const { return values[iy * x.size() + ix]; }
  double min_value() const;
};

// W(xi) = (2/pi) sum_n (-1)^n e^{-2|xi|^2} p_n L_n(4|xi|^2), xi = x + i y.
double wigner_point(const PhononDistribution& dist, double x, double y);
WignerGrid wigner(const PhononDistribution& dist, const GridSpec& spec);

PhononDistribution thermal_reference(double nbar, std::size_t n_c);

double mean_phonon(const PhononDistribution& dist);

// sum p ln p + (nbar+1) ln(nbar+1) - nbar ln nbar
double non_gaussianity_fock(const PhononDistribution& dist);

// (1/2)[1 + (Tr rho_G^2 - 2 Tr rho_G rho) / Tr rho^2]
double non_gaussianity_hs(const PhononDistribution& rho, const PhononDistribution& rho_g);
double non_gaussianity_hs(const DensityMatrix& rho, const PhononDistribution& rho_g);

// sum n(n-1) p_n / (sum n p_n)^2
double g2_zero(const PhononDistribution& dist);

double total_variation(const PhononDistribution& a, const PhononDistribution& b);

}  // namespace optomech
