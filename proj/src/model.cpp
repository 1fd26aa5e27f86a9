#include "optomech/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

constexpr double kPoleTol = 1e-12;

double checked_denominator(double d, const char* what) {
  if (std::abs(d) <= kPoleTol) throw PoleError(std::string("pole: ") + what + " vanishes");
  return d;
}

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta < 1.0)) {
    throw RangeError("Lamb-Dicke parameter must lie in [0, 1), got " + std::to_string(eta));
  }
}

void check_ctrl(const SeriesControl& ctrl) {
  if (ctrl.max_terms < 1 || !(ctrl.tail_tol > 0.0)) {
    throw ParameterError("series control needs max_terms >= 1 and tail_tol > 0");
  }
}

// Sums t_0 + t_1 + ... where t_{m+1} = t_m * ratio(m). Stops once the next
// term is below tail_tol relative to the running sum.
template <typename Ratio>
SeriesResult sum_by_ratio(double first, Ratio ratio, const SeriesControl& ctrl, const char* name) {
  check_ctrl(ctrl);
  SeriesResult r;
  double term = first;
  for (int m = 0; m < ctrl.max_terms; ++m) {
    r.value += term;
    r.terms = m + 1;
    term *= ratio(m);
    if (std::abs(term) <= ctrl.tail_tol * std::max(std::abs(r.value), 1e-300) || term == 0.0) {
      r.dropped = std::abs(term);
      return r;
    }
  }
  throw SeriesDivergenceError(std::string(name) + " did not converge within " +
                              std::to_string(ctrl.max_terms) + " terms");
}

}  // namespace

std::string to_string(AlphaConvention c) {
  return c == AlphaConvention::derived ? "derived" : "literal";
}

AlphaConvention alpha_convention_from_string(const std::string& s) {
  if (s == "derived") return AlphaConvention::derived;
  if (s == "literal") return AlphaConvention::literal;
  throw ParameterError("alpha_convention must be 'derived' or 'literal', got '" + s + "'");
}

void SystemParams::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw ParameterError(msg);
  };
  const std::array<double, 9> all{omega_m, J, eps, delta_a, delta_b, kappa_b, gamma_p, nbar_p,
                                  kappa_a_value()};
  require(std::all_of(all.begin(), all.end(), [](double v) { return std::isfinite(v); }),
          "all parameters must be finite");
  require(omega_m > 0.0, "omega_m > 0 required");
  require(kappa_b > 0.0, "kappa_b > 0 required");
  require(kappa_a_value() >= 0.0, "kappa_a >= 0 required");
  require(gamma_p >= 0.0, "gamma_p >= 0 required");
  require(nbar_p >= 0.0, "nbar_p >= 0 required");
  require(eps >= 0.0, "eps >= 0 required");
}

SeriesResult f1_element(std::size_t n, double eta, const SeriesControl& ctrl) {
  check_eta(eta);
  const double e2 = eta * eta;
  const double nn = static_cast<double>(n);
  return sum_by_ratio(
      1.0, [&](int m) { return -e2 * (nn + m + 1) / ((m + 1.0) * (m + 1.0)); }, ctrl, "f1 series");
}

SeriesResult f2_element(std::size_t n, double eta, const SeriesControl& ctrl) {
  check_eta(eta);
  const double e2 = eta * eta;
  const double nn = static_cast<double>(n);
  return sum_by_ratio(
      eta, [&](int m) { return -e2 * (nn + m + 1) / ((m + 1.0) * (m + 2.0)); }, ctrl, "f2 series");
}

double g_func(std::size_t x, std::size_t y, double eta) {
  // g(x,y) = (-1)^x prod_{i=1..x} eta^2 (y+1+i) / (i (i+1))
  double v = 1.0;
  const double e2 = eta * eta;
  for (std::size_t i = 1; i <= x; ++i) {
    v *= -e2 * static_cast<double>(y + 1 + i) / (static_cast<double>(i) * static_cast<double>(i + 1));
  }
  if (!std::isfinite(v)) {
    throw RangeError("g(" + std::to_string(x) + "," + std::to_string(y) + ") overflows");
  }
  return v;
}

SeriesResult g_sum(std::size_t n, double eta, const SeriesControl& ctrl) {
  check_eta(eta);
  const double e2 = eta * eta;
  const double nn = static_cast<double>(n);
  // g(m+1,n)/g(m,n) = -eta^2 (m+n+2) / ((m+1)(m+2))
  return sum_by_ratio(
      1.0, [&](int m) { return -e2 * (nn + m + 2) / ((m + 1.0) * (m + 2.0)); }, ctrl,
      "sum_m g(m,n)");
}

double chi_e(const SystemParams& p) {
  return p.J * p.J / checked_denominator(p.omega_m - p.delta_a, "omega_m - Delta_a");
}

double alpha_bar(const SystemParams& p) {
  const double eta = p.eta();
  return std::exp(0.5 * eta * eta) * p.J * p.eps /
         checked_denominator(p.delta_a - p.omega_m, "Delta_a - omega_m");
}

double alpha_n(const SystemParams& p, std::size_t n, AlphaConvention convention,
               const SeriesControl& ctrl) {
  const double eta = p.eta();
  const double level = eta * std::sqrt(static_cast<double>(n) + 1.0) * g_sum(n, eta, ctrl).value;
  const double prefactor = convention == AlphaConvention::derived
                               ? alpha_bar(p)
                               : std::exp(0.5 * eta * eta) * p.eps;
  return prefactor * level;
}

AlphaPair alpha_n_pair(const SystemParams& p, std::size_t n, const SeriesControl& ctrl) {
  AlphaPair out{std::numeric_limits<double>::quiet_NaN(),
                alpha_n(p, n, AlphaConvention::literal, ctrl)};
  try {
    out.derived = alpha_n(p, n, AlphaConvention::derived, ctrl);
  } catch (const PoleError&) {
  }
  return out;
}

PhiCoefficients phi_coefficients(std::size_t n, double eta, const SeriesControl& ctrl,
                                 PhiOrdering ordering) {
  check_eta(eta);
  check_ctrl(ctrl);
  const double nn = static_cast<double>(n);

  // m-sums with weights 1, (m+1), (n+m+2) against g(m, n).
  auto m_sums = [&](std::array<double, 3>& s) {
    double term = 1.0;  // g(0, n)
    const double e2 = eta * eta;
    for (int m = 0; m < ctrl.max_terms; ++m) {
      const std::array<double, 3> w{1.0, m + 1.0, nn + m + 2.0};
      for (int i = 0; i < 3; ++i) s[i] += w[i] * term;
      term *= -e2 * (nn + m + 2) / ((m + 1.0) * (m + 2.0));
      const double next = std::abs(term) * (nn + m + 3.0);
      const double scale = std::max({std::abs(s[0]), std::abs(s[1]), std::abs(s[2]), 1e-300});
      if (next <= ctrl.tail_tol * scale || term == 0.0) return;
    }
    throw SeriesDivergenceError("phase m-series did not converge within " +
                                std::to_string(ctrl.max_terms) + " terms");
  };

  std::array<double, 3> sm{0.0, 0.0, 0.0};
  m_sums(sm);

  std::array<double, 3> sk{0.0, 0.0, 0.0};
  PhiCoefficients out;
  if (ordering == PhiOrdering::swapped) {
    // g(k, n) has the same k-dependence as g(m, n).
    sk = sm;
    out.k_series_converged = true;
  } else {
    // g(n, k) = g(n, 0) * prod_{i=1..k} (n+i+1)/(i+1): grows with k, so the
    // sum is taken over exactly max_terms terms.
    double term = g_func(n, 0, eta);
    for (int k = 0; k < ctrl.max_terms; ++k) {
      const std::array<double, 3> w{1.0, k + 1.0, nn + k + 2.0};
      for (int i = 0; i < 3; ++i) sk[i] += w[i] * term;
      term *= (nn + k + 2.0) / (k + 2.0);
    }
    out.k_series_converged = false;
  }

  out.a = (nn + 1.0) * sm[1] * sk[1];
  out.b = eta * eta * sm[0] * sk[0];
  out.c = eta * eta * sm[2] * sk[2] / ((nn + 1.0) * (nn + 2.0));
  return out;
}

double phi_from_coefficients(const SystemParams& p, const PhiCoefficients& coef) {
  const double da = p.delta_a;
  const double wm = p.omega_m;
  checked_denominator(da, "Delta_a");
  checked_denominator(da - wm, "Delta_a - omega_m");
  checked_denominator(da + wm, "Delta_a + omega_m");
  const double eta = p.eta();
  const double shift = coef.a / da + coef.b / (da - wm) + coef.c / (da + wm);
  return -chi_e(p) - std::exp(eta * eta) * p.eps * p.eps * shift;
}

double phi_n(const SystemParams& p, std::size_t n, const SeriesControl& ctrl,
             PhiOrdering ordering) {
  return phi_from_coefficients(p, phi_coefficients(n, p.eta(), ctrl, ordering));
}

Operator build_full_hamiltonian(const SystemParams& p, std::size_t n_c) {
  const FockSpace cavity(2);
  const FockSpace phonon(n_c);
  const Dims dims{2, 2, n_c};

  const Operator a = embed(annihilation(cavity), 0, dims);
  const Operator b = embed(annihilation(cavity), 1, dims);
  const Operator c = embed(annihilation(phonon), 2, dims);
  const Operator ad = a.adjoint();
  const Operator bd = b.adjoint();
  const Operator cd = c.adjoint();

  const Operator photons = ad * a + bd * b;
  const Operator hop = ad * b;

  Operator h = p.delta_a * (ad * a) + p.delta_b * (bd * b) + p.omega_m * (cd * c);
  h += photons * (c + cd);
  h += p.J * (hop + hop.adjoint());
  h += p.eps * (a + ad);
  return h;
}

Operator polaron_transform(const Operator& h, double eta) {
  const Dims& dims = h.dims();
  if (dims.size() < 2) throw ShapeError("polaron transform needs photon modes and a phonon mode");
  const std::size_t phonon_mode = dims.size() - 1;

  Operator photons = Operator::zero(dims);
  for (std::size_t k = 0; k < phonon_mode; ++k) {
    const Operator a = embed(annihilation(FockSpace(dims[k])), k, dims);
    photons += a.adjoint() * a;
  }
  const Operator c = embed(annihilation(FockSpace(dims[phonon_mode])), phonon_mode, dims);

  // S = eta N (c^dag - c) is anti-Hermitian; K = i S is Hermitian and
  // e^S = V diag(e^{-i lambda}) V^dag.
  const Matrix k = cplx(0.0, 1.0) * eta * (photons * (c.adjoint() - c)).matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (k + k.adjoint()));
  const Vector phases = (-cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  const Matrix u = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  return Operator(dims, u * h.matrix() * u.adjoint());
}

}  // namespace optomech
