#include <doctest.h>

#include <cmath>
#include <random>

#include "optomech/errors.hpp"
#include "optomech/lindblad.hpp"
#include "optomech/observables.hpp"

using namespace optomech;

namespace {

Matrix random_density(std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const auto n = static_cast<Eigen::Index>(d);
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k) a(i, k) = cplx(nd(rng), nd(rng));
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("vectorization round trip stacks columns") {
  Matrix m(2, 2);
  m << cplx(1), cplx(2), cplx(3), cplx(4);
  const Vector v = vectorize(m);
  CHECK(v(1) == cplx(3));  // rho(1, 0)
  CHECK(v(2) == cplx(2));  // rho(0, 1)
  CHECK((unvectorize(v, 2) - m).norm() == 0.0);
  CHECK_THROWS_AS(unvectorize(v, 3), ShapeError);
}

TEST_CASE("superoperator matches the master equation applied directly") {
  std::mt19937_64 rng(11);
  const FockSpace s(4);
  const Operator c = annihilation(s);
  const Operator h = number(s) * cplx(0.7) + (c + c.adjoint()) * cplx(0.3);
  const std::vector<LindbladChannel> ch{{0.4, c}, {0.1, c.adjoint()}, {0.25, projector_transfer(s, 1, 2)}};
  const Liouvillian l = build_liouvillian(h, ch);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix rho = random_density(4, rng);
    Matrix expected = cplx(0.0, -1.0) * (h.matrix() * rho - rho * h.matrix());
    for (const auto& k : ch) expected += k.rate * dissipator(k.jump, rho);
    CHECK((l.apply(rho) - expected).norm() < 1e-13);
  }
  // Trace preservation: vec(I)^dag L = 0.
  const Vector id = vectorize(Matrix::Identity(4, 4));
  CHECK((id.adjoint() * l.matrix()).norm() < 1e-13);
}

TEST_CASE("channels must share the Hamiltonian space") {
  const Operator h = number(FockSpace(3));
  const std::vector<LindbladChannel> bad{{1.0, annihilation(FockSpace(4))}};
  CHECK_THROWS_AS(build_liouvillian(h, bad), ShapeError);
  const std::vector<LindbladChannel> neg{{-1.0, annihilation(FockSpace(3))}};
  CHECK_THROWS_AS(build_liouvillian(h, neg), ParameterError);
}

TEST_CASE("single excitation decays exponentially") {
  const double gamma = 0.8;
  const FockSpace s(2);
  const std::vector<LindbladChannel> ch{{0.5 * gamma, annihilation(s)}};
  const Liouvillian l = build_liouvillian(Dims{2}, ch);
  const DensityMatrix one = DensityMatrix::basis_state({2}, 1);
  for (EvolveMethod method : {EvolveMethod::rk4_fixed, EvolveMethod::rk4_adaptive}) {
    EvolveControl ctrl;
    ctrl.t_final = 3.0;
    ctrl.method = method;
    ctrl.snapshot_every = 10;
    const auto snaps = evolve(one, l, ctrl);
    CHECK(snaps.size() > 2);
    for (const auto& sn : snaps) {
      CHECK(std::abs(sn.rho.matrix()(1, 1).real() - std::exp(-gamma * sn.t)) < 1e-6);
      CHECK(std::abs(sn.rho.trace() - 1.0) < 1e-10);
    }
    CHECK(snaps.back().t == 3.0);
  }
}

TEST_CASE("coherent oscillation under a Hamiltonian") {
  const FockSpace s(2);
  const Operator sx = projector_transfer(s, 0, 1) + projector_transfer(s, 1, 0);
  const Liouvillian l = build_liouvillian(sx, std::vector<LindbladChannel>{});
  EvolveControl ctrl;
  ctrl.t_final = 1.3;
  ctrl.dt = 1e-3;
  const auto snaps = evolve(DensityMatrix::basis_state({2}, 0), l, ctrl);
  const double p1 = snaps.back().rho.matrix()(1, 1).real();
  CHECK(std::abs(p1 - std::pow(std::sin(1.3), 2)) < 1e-9);
}

TEST_CASE("thermal steady state of the damped oscillator") {
  const std::size_t n = 10;
  const double nbar = 0.6, gamma = 1e-3;
  const SelectiveDamping s{gamma, nbar, 0, 0.0};
  const auto ch = effective_channels(s, n);
  const SteadyState ss = steady_state(build_liouvillian(Dims{n}, ch));
  CHECK(ss.residual < 1e-10);
  // Truncated thermal law: geometric with ratio nbar/(nbar+1), renormalized.
  const double r = nbar / (nbar + 1.0);
  const double z = (1.0 - std::pow(r, static_cast<double>(n))) / (1.0 - r);
  for (std::size_t k = 0; k < n; ++k) {
    CHECK(std::abs(ss.rho.matrix()(k, k).real() - std::pow(r, static_cast<double>(k)) / z) < 1e-10);
  }
  // Coherences vanish.
  Matrix off = ss.rho.matrix();
  off.diagonal().setZero();
  CHECK(off.norm() < 1e-10);
}

TEST_CASE("non-unique steady state is reported") {
  const Operator h = number(FockSpace(3));
  const Liouvillian l = build_liouvillian(h, std::vector<LindbladChannel>{});
  CHECK_THROWS_AS(steady_state(l), NonUniqueSteadyStateError);
}

TEST_CASE("rate chain detailed balance and reducibility") {
  const SelectiveDamping s{1e-5, 10.0, 1, 2.0};
  const RateChain chain = thermal_selective_chain(s, 40);
  CHECK(chain.down_total(2) == doctest::Approx(chain.down[2] + 2.0));
  CHECK(chain.down_total(1) == chain.down[1]);
  const PhononDistribution d = chain_steady_state(chain);
  for (std::size_t n = 0; n + 1 < chain.size(); ++n) {
    const double fwd = d[n] * chain.up[n];
    const double back = d[n + 1] * chain.down_total(n + 1);
    CHECK(std::abs(fwd - back) <= 1e-12 * (fwd + back));
  }

  RateChain frozen = chain;
  for (auto& v : frozen.down) v = 0.0;
  frozen.extra_rate = 0.0;
  CHECK_THROWS_AS(chain_steady_state(frozen), ReducibleChainError);
  CHECK_THROWS_AS(chain_steady_state(SelectiveDamping{0.0, 1.0, 1, 1.0}), ReducibleChainError);
}

TEST_CASE("chain truncation grows until the tail is negligible") {
  const SelectiveDamping s{1e-5, 10.0, 2, 1e-3};
  const PhononDistribution d = chain_steady_state(s);
  CHECK(d.explicit_p().back() * 11.0 < 1e-12);
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-14));
  const AnalyticPopulations a = analytic_populations(s, 8);
  for (std::size_t n = 0; n < d.size(); ++n) CHECK(std::abs(d[n] - a.dist[n]) < 1e-12);
}

TEST_CASE("engineered channels on too few levels drop the selective jump") {
  const SelectiveDamping s{1e-5, 1.0, 3, 1.0};
  CHECK(effective_channels(s, 4).size() == 2);
  CHECK(effective_channels(s, 5).size() == 3);
}

TEST_CASE("full-model channels act on the three-mode space") {
  SystemParams p;
  p.kappa_a = 0.2;
  const auto ch = full_model_channels(p, 5);
  CHECK(ch.size() == 4);
  CHECK(ch[0].rate == doctest::Approx(0.1));
  CHECK(ch[1].rate == doctest::Approx(0.075));
  for (const auto& c : ch) CHECK(c.jump.dims() == Dims{2, 2, 5});
}
