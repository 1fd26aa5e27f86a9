#include "optomech/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

double trace_of(const Vector& v, std::size_t d) {
  cplx t = 0.0;
  for (std::size_t i = 0; i < d; ++i) t += v(static_cast<Eigen::Index>(i + i * d));
  return t.real();
}

double hermiticity_defect(const Vector& v, std::size_t d) {
  const Matrix m = unvectorize(v, d);
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Vector rk4_step(const Matrix& l, const Vector& v, double dt) {
  const Vector k1 = l * v;
  const Vector k2 = l * (v + 0.5 * dt * k1);
  const Vector k3 = l * (v + 0.5 * dt * k2);
  const Vector k4 = l * (v + dt * k3);
  return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

DensityMatrix to_density(const Vector& v, const Dims& dims, const EvolveControl& ctrl) {
  const std::size_t d = total_dim(dims);
  return DensityMatrix(Operator(dims, unvectorize(v, d)),
                       DensityTolerance{ctrl.hermitian_tol, ctrl.trace_tol, 1e-8});
}

}  // namespace

Liouvillian::Liouvillian(Dims dims, Matrix m, double rate_scale)
    : dims_(std::move(dims)), m_(std::move(m)), rate_scale_(rate_scale) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims_) * total_dim(dims_));
  if (m_.rows() != n || m_.cols() != n) throw ShapeError("superoperator size mismatch");
}

Matrix Liouvillian::apply(const Matrix& rho) const {
  if (rho.rows() != static_cast<Eigen::Index>(dim())) throw ShapeError("state dimension mismatch");
  return unvectorize(m_ * vectorize(rho), dim());
}

Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  if (v.size() != n * n) throw ShapeError("vector length is not d^2");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

Liouvillian build_liouvillian(const Operator& h, std::span<const LindbladChannel> channels) {
  const auto d = static_cast<Eigen::Index>(h.dim());
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& H = h.matrix();

  Matrix l = cplx(0.0, -1.0) * (kron(id, H) - kron(H.transpose(), id));
  double scale = inf_norm(H);
  double max_rate = 0.0;
  for (const auto& ch : channels) {
    if (ch.jump.dims() != h.dims()) throw ShapeError("channel operator lives on a different space");
    if (!(ch.rate >= 0.0)) throw ParameterError("channel rate must be >= 0");
    if (ch.rate == 0.0) continue;
    const Matrix& o = ch.jump.matrix();
    const Matrix odo = o.adjoint() * o;
    l += ch.rate * (2.0 * kron(o.conjugate(), o) - kron(id, odo) - kron(odo.transpose(), id));
    max_rate = std::max(max_rate, ch.rate * inf_norm(odo));
  }
  scale += 2.0 * max_rate;
  return Liouvillian(h.dims(), std::move(l), scale);
}

Liouvillian build_liouvillian(const Dims& dims, std::span<const LindbladChannel> channels) {
  return build_liouvillian(Operator::zero(dims), channels);
}

std::vector<Snapshot> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                             const EvolveControl& ctrl) {
  if (rho0.dims() != l.dims()) throw ShapeError("initial state and generator spaces differ");
  if (!(ctrl.t_final >= 0.0) || ctrl.dt < 0.0) throw ParameterError("evolve needs dt >= 0, t_final >= 0");

  const std::size_t d = l.dim();
  const Matrix& L = l.matrix();
  Vector v = vectorize(rho0.matrix());
  std::vector<Snapshot> out;
  out.push_back({0.0, rho0});

  double dt = ctrl.dt > 0.0 ? ctrl.dt : 0.02 / std::max(l.rate_scale(), 1e-300);
  if (ctrl.t_final == 0.0) return out;

  auto check = [&](double t) {
    if (std::abs(trace_of(v, d) - 1.0) > ctrl.trace_tol) {
      throw IntegrationError("trace drifted beyond tolerance at t = " + std::to_string(t) +
                             "; reduce dt");
    }
    if (hermiticity_defect(v, d) > ctrl.hermitian_tol) {
      throw IntegrationError("Hermiticity lost at t = " + std::to_string(t) + "; reduce dt");
    }
  };

  double t = 0.0;
  std::size_t accepted = 0;
  if (ctrl.method == EvolveMethod::rk4_fixed) {
    const auto steps = static_cast<std::size_t>(std::ceil(ctrl.t_final / dt - 1e-12));
    dt = ctrl.t_final / static_cast<double>(steps);
    for (std::size_t s = 1; s <= steps; ++s) {
      v = rk4_step(L, v, dt);
      t = static_cast<double>(s) * dt;
      check(t);
      ++accepted;
      if (ctrl.snapshot_every > 0 && accepted % ctrl.snapshot_every == 0 && s != steps) {
        out.push_back({t, to_density(v, l.dims(), ctrl)});
      }
    }
  } else {
    while (t < ctrl.t_final) {
      const double h = std::min(dt, ctrl.t_final - t);
      const Vector full = rk4_step(L, v, h);
      const Vector half = rk4_step(L, rk4_step(L, v, 0.5 * h), 0.5 * h);
      const double err = (half - full).cwiseAbs().maxCoeff() / 15.0;
      if (err <= ctrl.step_tol || h < 1e-14) {
        v = half + (half - full) / 15.0;
        t += h;
        check(t);
        ++accepted;
        if (ctrl.snapshot_every > 0 && accepted % ctrl.snapshot_every == 0 && t < ctrl.t_final) {
          out.push_back({t, to_density(v, l.dims(), ctrl)});
        }
      }
      const double factor = err > 0.0 ? 0.9 * std::pow(ctrl.step_tol / err, 0.2) : 4.0;
      dt = h * std::clamp(factor, 0.1, 4.0);
    }
  }
  out.push_back({ctrl.t_final, to_density(v, l.dims(), ctrl)});
  return out;
}

SteadyState steady_state(const Liouvillian& l, const SteadyStateOptions& opts) {
  const std::size_t d = l.dim();
  const Matrix& L = l.matrix();
  const Eigen::Index n = L.rows();

  Eigen::BDCSVD<Matrix> svd(L);
  const auto& sv = svd.singularValues();
  const double gap = n >= 2 ? sv(n - 2) / sv(0) : 1.0;
  if (!(gap > opts.uniqueness_ratio)) {
    throw NonUniqueSteadyStateError("steady state is not unique: singular value ratio " +
                                    std::to_string(gap));
  }

  // Replace the (redundant) d rho_00/dt row by the trace functional.
  Matrix m = L;
  m.row(0).setZero();
  for (std::size_t i = 0; i < d; ++i) m(0, static_cast<Eigen::Index>(i + i * d)) = 1.0;
  Vector rhs = Vector::Zero(n);
  rhs(0) = 1.0;
  Vector x = m.partialPivLu().solve(rhs);

  Matrix rho = unvectorize(x, d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace();
  const double residual = (L * vectorize(rho)).norm();
  if (!(residual < opts.residual_tol)) {
    throw Error("steady-state residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return SteadyState{DensityMatrix(Operator(l.dims(), std::move(rho))), residual, gap};
}

double RateChain::down_total(std::size_t n) const {
  double r = down.at(n);
  if (n == extra_level + 1) r += extra_rate;
  return r;
}

RateChain thermal_selective_chain(const SelectiveDamping& s, std::size_t n_levels) {
  if (n_levels < 2) throw InvalidSpaceError("rate chain needs at least two levels");
  RateChain chain;
  chain.up.assign(n_levels, 0.0);
  chain.down.assign(n_levels, 0.0);
  for (std::size_t n = 0; n < n_levels; ++n) {
    const double nn = static_cast<double>(n);
    if (n + 1 < n_levels) chain.up[n] = s.gamma_p * s.nbar_p * (nn + 1.0);
    chain.down[n] = s.gamma_p * (s.nbar_p + 1.0) * nn;
  }
  chain.extra_level = s.j;
  chain.extra_rate = s.j + 1 < n_levels ? s.rate : 0.0;
  return chain;
}

PhononDistribution chain_steady_state(const RateChain& chain) {
  const std::size_t n = chain.size();
  if (n < 2 || chain.down.size() != n) throw ShapeError("malformed rate chain");
  std::vector<double> p(n, 0.0);
  p[0] = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (chain.up[k] < 0.0 || chain.down[k + 1] < 0.0 || chain.extra_rate < 0.0) {
      throw ParameterError("rate chain has a negative rate");
    }
    const double down = chain.down_total(k + 1);
    if (down == 0.0) {
      throw ReducibleChainError("rate chain is reducible: no decay out of level " +
                                std::to_string(k + 1));
    }
    p[k + 1] = p[k] * chain.up[k] / down;
  }
  double total = 0.0;
  for (double v : p) total += v;
  for (double& v : p) v /= total;

  double omitted = 0.0;
  if (n >= 3 && p[n - 2] > 0.0) {
    const double r = p[n - 1] / p[n - 2];
    omitted = r < 1.0 ? p[n - 1] * r / (1.0 - r) : std::numeric_limits<double>::infinity();
  }
  return PhononDistribution(std::move(p), std::nullopt, omitted);
}

PhononDistribution chain_steady_state(const SelectiveDamping& s, double tail_tol) {
  if (!(s.gamma_p > 0.0)) throw ReducibleChainError("thermal chain needs gamma_p > 0");
  std::size_t n = std::max<std::size_t>(s.j + 2, 16);
  for (;;) {
    PhononDistribution dist = chain_steady_state(thermal_selective_chain(s, n));
    if (dist.explicit_p().back() * (s.nbar_p + 1.0) < tail_tol) return dist;
    if (n > (std::size_t{1} << 20)) throw Error("rate chain truncation did not converge");
    n *= 2;
  }
}

std::vector<LindbladChannel> effective_channels(const SelectiveDamping& s, std::size_t n_c) {
  const FockSpace space(n_c);
  const Operator c = annihilation(space);
  std::vector<LindbladChannel> out;
  if (s.j + 1 < n_c) out.push_back({0.5 * s.rate, projector_transfer(space, s.j, s.j + 1)});
  out.push_back({0.5 * s.gamma_p * (s.nbar_p + 1.0), c});
  out.push_back({0.5 * s.gamma_p * s.nbar_p, c.adjoint()});
  return out;
}

std::vector<LindbladChannel> full_model_channels(const SystemParams& p, std::size_t n_c) {
  const Dims dims{2, 2, n_c};
  const Operator a = embed(annihilation(FockSpace(2)), 0, dims);
  const Operator b = embed(annihilation(FockSpace(2)), 1, dims);
  const Operator c = embed(annihilation(FockSpace(n_c)), 2, dims);
  return {
      {0.5 * p.kappa_a_value(), a},
      {0.5 * p.kappa_b, b},
      {0.5 * p.gamma_p * (p.nbar_p + 1.0), c},
      {0.5 * p.gamma_p * p.nbar_p, c.adjoint()},
  };
}

}  // namespace optomech
