#pragma once

// Fock-diagonal phonon states and the parameters of the engineered
// phonon-only master equation.

#include <cstddef>
#include <optional>
#include <vector>

#include "optomech/model.hpp"

namespace optomech {

// p_n = amplitude * ratio^n for every n >= start.
struct GeometricTail {
  std::size_t start = 0;
  double amplitude = 0.0;
  double ratio = 0.0;

  double mass() const;
  double first_moment() const;      // sum n p_n
  double factorial_moment() const;  // sum n (n-1) p_n
  double entropy_sum() const;       // sum p_n ln p_n
};

// Explicit populations on levels 0..size()-1, optionally continued by an
// analytic geometric tail. omitted_mass bounds probability that is neither
// explicit nor covered by the tail (zero when an analytic tail is attached).
class PhononDistribution {
 public:
  explicit PhononDistribution(std::vector<double> p, std::optional<GeometricTail> tail = {},
                              double omitted_mass = 0.0);

  const std::vector<double>& explicit_p() const { return p_; }
  std::size_t size() const { return p_.size(); }
  const std::optional<GeometricTail>& tail() const { return tail_; }
  double omitted_mass() const { return omitted_mass_; }

  // Population of any level, tail included.
  double operator[](std::size_t n) const;
  double total() const;

  // Explicit values continued along the tail until the remaining tail mass
  // drops below tol.
  std::vector<double> materialize(double tol = 1e-15) const;

 private:
  std::vector<double> p_;
  std::optional<GeometricTail> tail_;
  double omitted_mass_;
};

// Rates of the engineered master equation
//   drho/dt = (Gamma/2) D(|j><j+1|) + (gamma_p/2)(nbar_p+1) D(c) + (gamma_p/2) nbar_p D(c^dag)
// with Gamma = 2 alpha_j^2 / kappa_b.
struct SelectiveDamping {
  double gamma_p = 0.0;
  double nbar_p = 0.0;
  std::size_t j = 0;
  double rate = 0.0;  // Gamma_j
};

SelectiveDamping selective_damping(const SystemParams& p, std::size_t j, AlphaConvention convention,
                                   const SeriesControl& ctrl = {});
inline SelectiveDamping selective_damping(const SystemParams& p, std::size_t j,
                                          const SeriesControl& ctrl = {}) {
  return selective_damping(p, j, p.alpha_convention, ctrl);
}

}  // namespace optomech
