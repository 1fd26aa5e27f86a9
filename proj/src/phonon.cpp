#include "optomech/phonon.hpp"

#include <cmath>
#include <numeric>

#include "optomech/errors.hpp"

namespace optomech {

double GeometricTail::mass() const {
  if (amplitude == 0.0) return 0.0;
  return amplitude * std::pow(ratio, static_cast<double>(start)) / (1.0 - ratio);
}

double GeometricTail::first_moment() const {
  if (amplitude == 0.0) return 0.0;
  const double r = ratio;
  const double s = static_cast<double>(start);
  return amplitude * std::pow(r, s) * (s * (1.0 - r) + r) / ((1.0 - r) * (1.0 - r));
}

double GeometricTail::factorial_moment() const {
  if (amplitude == 0.0) return 0.0;
  // r^2 d^2/dr^2 [r^s / (1 - r)]
  const double r = ratio;
  const double s = static_cast<double>(start);
  const double q = 1.0 - r;
  return amplitude * std::pow(r, s) *
         (s * (s - 1.0) / q + 2.0 * s * r / (q * q) + 2.0 * r * r / (q * q * q));
}

double GeometricTail::entropy_sum() const {
  if (amplitude == 0.0 || ratio == 0.0) return 0.0;
  return std::log(amplitude) * mass() + std::log(ratio) * first_moment();
}

PhononDistribution::PhononDistribution(std::vector<double> p, std::optional<GeometricTail> tail,
                                       double omitted_mass)
    : p_(std::move(p)), tail_(tail), omitted_mass_(omitted_mass) {
  for (double v : p_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error("phonon populations must be finite and >= 0");
  }
  if (tail_) {
    if (tail_->start != p_.size()) throw Error("geometric tail must start right after explicit levels");
    if (!(tail_->ratio >= 0.0 && tail_->ratio < 1.0) || !(tail_->amplitude >= 0.0)) {
      throw Error("geometric tail needs amplitude >= 0 and ratio in [0, 1)");
    }
  }
}

double PhononDistribution::operator[](std::size_t n) const {
  if (n < p_.size()) return p_[n];
  if (tail_) return tail_->amplitude * std::pow(tail_->ratio, static_cast<double>(n));
  return 0.0;
}

double PhononDistribution::total() const {
  const double s = std::accumulate(p_.begin(), p_.end(), 0.0);
  return s + (tail_ ? tail_->mass() : 0.0);
}

std::vector<double> PhononDistribution::materialize(double tol) const {
  std::vector<double> out = p_;
  if (!tail_ || tail_->amplitude == 0.0) return out;
  const double r = tail_->ratio;
  double term = tail_->amplitude * std::pow(r, static_cast<double>(out.size()));
  while (term / (1.0 - r) > tol) {
    out.push_back(term);
    term *= r;
  }
  return out;
}

SelectiveDamping selective_damping(const SystemParams& p, std::size_t j, AlphaConvention convention,
                                   const SeriesControl& ctrl) {
  const double a = alpha_n(p, j, convention, ctrl);
  return SelectiveDamping{p.gamma_p, p.nbar_p, j, 2.0 * a * a / p.kappa_b};
}

}  // namespace optomech
