#include "optomech/selectivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "optomech/errors.hpp"
#include "optomech/observables.hpp"
#include "optomech/working_points.hpp"

namespace optomech {

namespace {

std::array<double, 3> poles(const SystemParams& p) { return {-p.omega_m, 0.0, p.omega_m}; }

ConditionFlag classify(double v, const ConditionThresholds& t) {
  if (!std::isfinite(v)) return ConditionFlag::fail;
  if (v < t.ok) return ConditionFlag::ok;
  if (v < t.warn) return ConditionFlag::warn;
  return ConditionFlag::fail;
}

double safe_ratio(double num, double den) {
  return den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
}

}  // namespace

std::string to_string(ConditionFlag f) {
  switch (f) {
    case ConditionFlag::ok:
      return "OK";
    case ConditionFlag::warn:
      return "WARN";
    case ConditionFlag::fail:
      return "FAIL";
  }
  return "FAIL";
}

SelectivityReport audit_conditions(const SystemParams& p, std::size_t j,
                                   const ConditionThresholds& thresholds,
                                   const SeriesControl& ctrl) {
  SelectivityReport r;
  r.j = j;
  r.convention = p.alpha_convention;
  r.delta_a = p.delta_a;
  r.thresholds = thresholds;

  const double eta = p.eta();
  const double da = p.delta_a;
  double alpha_j = std::numeric_limits<double>::quiet_NaN();
  try {
    alpha_j = alpha_n(p, j, ctrl);
  } catch (const PoleError&) {
  }

  auto add = [&](std::string name, double v) {
    r.conditions.push_back({std::move(name), v, classify(v, thresholds)});
  };
  add("J/|Delta_a-Delta_b|", safe_ratio(p.J, std::abs(da - p.delta_b)));
  add("eps/|Delta_a|", safe_ratio(p.eps, std::abs(da)));
  add("eta*eps/|Delta_a-omega_m|", safe_ratio(eta * p.eps, std::abs(da - p.omega_m)));
  add("eta*eps/|Delta_a+omega_m|", safe_ratio(eta * p.eps, std::abs(da + p.omega_m)));
  add("|alpha_j|/kappa_b", std::abs(alpha_j) / p.kappa_b);

  if (std::isfinite(alpha_j) && p.gamma_p > 0.0) {
    const auto pops = analytic_populations(SelectiveDamping{p.gamma_p, p.nbar_p, j,
                                                            2.0 * alpha_j * alpha_j / p.kappa_b},
                                           j + 2);
    r.truncation_ratio = pops.zeta1 * pops.varpi;
  } else {
    r.truncation_ratio = std::numeric_limits<double>::quiet_NaN();
  }
  r.truncation_flag = classify(r.truncation_ratio, thresholds);

  const PhiCoefficients coef_j = phi_coefficients(j, eta, ctrl);
  r.k_series_converged = coef_j.k_series_converged;
  try {
    r.residual = std::abs(phi_from_coefficients(p, coef_j));
  } catch (const PoleError&) {
    r.residual = std::numeric_limits<double>::infinity();
  }

  for (std::size_t n = 0; n <= j + 5; ++n) {
    LevelRow row{n, std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN(),
                 std::numeric_limits<double>::quiet_NaN()};
    try {
      row.alpha_n = alpha_n(p, n, ctrl);
    } catch (const PoleError&) {
    }
    try {
      row.phi_n = phi_n(p, n, ctrl);
    } catch (const PoleError&) {
    }
    row.ratio = std::abs(row.phi_n) / std::abs(row.alpha_n);
    r.levels.push_back(row);
  }
  return r;
}

SelectivityReport solve_detuning(const SystemParams& p, std::size_t j, Bracket bracket,
                                 const SeriesControl& ctrl, const RootOptions& opts,
                                 const ConditionThresholds& thresholds) {
  if (!(bracket.lo < bracket.hi)) throw InvalidBracketError("bracket needs lo < hi");
  for (double pole : poles(p)) {
    if (pole >= bracket.lo && pole <= bracket.hi) {
      throw InvalidBracketError("bracket [" + std::to_string(bracket.lo) + ", " +
                                std::to_string(bracket.hi) + "] contains the pole at " +
                                std::to_string(pole));
    }
  }

  const PhiCoefficients coef = phi_coefficients(j, p.eta(), ctrl);
  SystemParams q = p;
  auto phi = [&](double x) {
    q.delta_a = x;
    return phi_from_coefficients(q, coef);
  };

  double lo = bracket.lo;
  double hi = bracket.hi;
  double flo = phi(lo);
  double fhi = phi(hi);
  if (std::signbit(flo) == std::signbit(fhi) && flo != 0.0 && fhi != 0.0) {
    throw BracketError("phi_" + std::to_string(j) + " has no sign change on [" +
                           std::to_string(lo) + ", " + std::to_string(hi) +
                           "]: phi(lo) = " + std::to_string(flo) +
                           ", phi(hi) = " + std::to_string(fhi),
                       flo, fhi);
  }

  double best = std::abs(flo) < std::abs(fhi) ? lo : hi;
  double fbest = std::min(std::abs(flo), std::abs(fhi));
  int it = 0;
  bool secant_turn = false;
  while (it < opts.max_iter && fbest > 1e-3 * opts.phi_tol) {
    const double width = hi - lo;
    const double ulp = std::nextafter(std::max(std::abs(lo), std::abs(hi)), INFINITY) -
                       std::max(std::abs(lo), std::abs(hi));
    if (width <= 2.0 * ulp) break;
    double x = 0.5 * (lo + hi);
    if (secant_turn && fhi != flo) {
      const double s = hi - fhi * (hi - lo) / (fhi - flo);
      if (s > lo && s < hi) x = s;
    }
    secant_turn = !secant_turn;
    const double fx = phi(x);
    ++it;
    if (std::abs(fx) < fbest) {
      fbest = std::abs(fx);
      best = x;
    }
    if (fx == 0.0) break;
    if (std::signbit(fx) == std::signbit(flo)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
  }
  if (!(fbest < opts.phi_tol)) {
    throw Error("phi_" + std::to_string(j) + " root not resolved: |phi| = " + std::to_string(fbest));
  }

  q.delta_a = best;
  SelectivityReport r = audit_conditions(q, j, thresholds, ctrl);
  r.bracket = bracket;
  r.iterations = it;
  r.residual = fbest;
  return r;
}

std::vector<Bracket> scan_sign_changes(const SystemParams& p, std::size_t j, Bracket range,
                                       std::size_t samples, const SeriesControl& ctrl) {
  if (samples < 2 || !(range.hi > range.lo)) throw ParameterError("scan needs samples >= 2, lo < hi");
  const PhiCoefficients coef = phi_coefficients(j, p.eta(), ctrl);
  const auto ps = poles(p);
  SystemParams q = p;
  std::vector<Bracket> out;
  double prev_x = range.lo;
  double prev_f = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = range.lo + (range.hi - range.lo) * static_cast<double>(i) /
                                    static_cast<double>(samples - 1);
    q.delta_a = x;
    double f = std::numeric_limits<double>::quiet_NaN();
    try {
      f = phi_from_coefficients(q, coef);
    } catch (const PoleError&) {
    }
    if (i > 0 && std::isfinite(prev_f) && std::isfinite(f) && std::signbit(prev_f) != std::signbit(f)) {
      const bool straddles_pole = std::any_of(ps.begin(), ps.end(), [&](double pole) {
        return pole >= prev_x && pole <= x;
      });
      if (!straddles_pole) out.push_back({prev_x, x});
    }
    prev_x = x;
    prev_f = f;
  }
  return out;
}

std::optional<double> reference_detuning(double eta, std::size_t j) {
  if (const WorkingPoint* wp = find_working_point(eta, j)) return wp->delta_a;
  return std::nullopt;
}

Bracket default_bracket(const SystemParams& p, std::size_t j) {
  const auto ref = reference_detuning(p.eta(), j);
  if (!ref) {
    throw ParameterError("no reference detuning for eta = " + std::to_string(p.eta()) +
                         ", j = " + std::to_string(j) + "; supply a bracket");
  }
  Bracket b{*ref - 0.5, *ref + 0.5};
  // Keep a relative margin from the poles so phi stays finite at the ends.
  for (double pole : poles(p)) {
    const double margin = 1e-9 * std::max(1.0, std::abs(pole));
    if (pole > b.lo && pole <= *ref) b.lo = pole + margin;
    if (pole < b.hi && pole >= *ref) b.hi = pole - margin;
  }
  return b;
}

}  // namespace optomech
