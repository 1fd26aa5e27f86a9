#pragma once

// Three-mode optomechanical model: two coupled cavities a, b (a driven) and a
// mechanical mode c coupled to both by radiation pressure. All frequencies and
// rates are in units of the single-photon optomechanical coupling g.

#include <cstddef>
#include <optional>
#include <string>

#include "optomech/fock.hpp"

namespace optomech {

// How the per-level selective coupling alpha_n carries its drive prefactor.
//  derived: e^{eta^2/2} J eps / (Delta_a - omega_m)   (same as alpha_bar)
//  literal: e^{eta^2/2} eps
enum class AlphaConvention { derived, literal };

std::string to_string(AlphaConvention c);
AlphaConvention alpha_convention_from_string(const std::string& s);

// Argument order of the second g(.,.) factor in the phase double sum.
// as_printed uses g(n, k); swapped uses g(k, n) and is for diagnostics only.
enum class PhiOrdering { as_printed, swapped };

struct SystemParams {
  double omega_m = 10.0;
  double J = 1.0;
  double eps = 3.0;
  double delta_a = -9.7;
  double delta_b = 10.0;
  double kappa_b = 0.15;
  std::optional<double> kappa_a;  // defaults to kappa_b
  double gamma_p = 1e-5;
  double nbar_p = 10.0;
  AlphaConvention alpha_convention = AlphaConvention::derived;

  // Lamb-Dicke parameter g / omega_m.
  double eta() const { return 1.0 / omega_m; }
  double kappa_a_value() const { return kappa_a.value_or(kappa_b); }

  // Throws ParameterError naming the violated invariant.
  void validate() const;
};

struct SeriesControl {
  int max_terms = 40;
  double tail_tol = 1e-14;
};

struct SeriesResult {
  double value = 0.0;
  double dropped = 0.0;  // magnitude of the first term not included
  int terms = 0;
};

// <n| f1(c c^dag) |n> = sum_m (-1)^m eta^{2m} (n+m)! / (n! (m!)^2)
SeriesResult f1_element(std::size_t n, double eta, const SeriesControl& ctrl = {});
// <n| f2(c c^dag) |n> = sum_m (-1)^m eta^{2m+1} (n+m)! / (n! m! (m+1)!)
SeriesResult f2_element(std::size_t n, double eta, const SeriesControl& ctrl = {});

// g(x,y) = (-1)^x eta^{2x} (x+y+1)! / (x! (x+1)! (y+1)!)
double g_func(std::size_t x, std::size_t y, double eta);

// sum_m g(m, n)
SeriesResult g_sum(std::size_t n, double eta, const SeriesControl& ctrl = {});

double chi_e(const SystemParams& p);
double alpha_bar(const SystemParams& p);

struct AlphaPair {
  double derived;
  double literal;
};

double alpha_n(const SystemParams& p, std::size_t n, AlphaConvention convention,
               const SeriesControl& ctrl = {});
inline double alpha_n(const SystemParams& p, std::size_t n, const SeriesControl& ctrl = {}) {
  return alpha_n(p, n, p.alpha_convention, ctrl);
}
// The derived entry is NaN when Delta_a sits on the omega_m pole.
AlphaPair alpha_n_pair(const SystemParams& p, std::size_t n, const SeriesControl& ctrl = {});

// The phase of level n has the form
//   phi_n(Delta_a) = -J^2/(omega_m - Delta_a)
//                    - e^{eta^2} eps^2 [ A/Delta_a + B/(Delta_a - omega_m) + C/(Delta_a + omega_m) ]
// where A, B, C depend only on (n, eta). Splitting them out makes root
// finding in Delta_a cheap.
struct PhiCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  // With the printed g(n, k) ordering the k-series does not decay; it is then
  // summed over exactly max_terms terms and this flag is false.
  bool k_series_converged = false;
};

PhiCoefficients phi_coefficients(std::size_t n, double eta, const SeriesControl& ctrl = {},
                                 PhiOrdering ordering = PhiOrdering::as_printed);
double phi_from_coefficients(const SystemParams& p, const PhiCoefficients& coef);
double phi_n(const SystemParams& p, std::size_t n, const SeriesControl& ctrl = {},
             PhiOrdering ordering = PhiOrdering::as_printed);

// H = Da a^dag a + Db b^dag b + wm c^dag c + (a^dag a + b^dag b)(c + c^dag)
//     + J (a^dag b + a b^dag) + eps (a + a^dag)
// on dims {2, 2, n_c}.
Operator build_full_hamiltonian(const SystemParams& p, std::size_t n_c);

// e^S H e^{-S}, S = eta (a^dag a + b^dag b)(c^dag - c). The last mode of H
// is the phonon mode; all preceding modes are photon modes.
Operator polaron_transform(const Operator& h, double eta);

}  // namespace optomech
