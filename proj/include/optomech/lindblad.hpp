#pragma once

// Liouvillian assembly, time evolution and steady states.
//
// Density matrices are vectorized by stacking columns, so
// vec(A X B) = (B^T (x) A) vec(X) and rho(i, k) sits at index i + k d.

#include <cstddef>
#include <span>
#include <vector>

#include "optomech/fock.hpp"
#include "optomech/model.hpp"
#include "optomech/phonon.hpp"

namespace optomech {

struct LindbladChannel {
  double rate;  // multiplies D(jump)
  Operator jump;
};

class Liouvillian {
 public:
  Liouvillian(Dims dims, Matrix m, double rate_scale);

  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return total_dim(dims_); }  // Hilbert-space dimension
  const Matrix& matrix() const { return m_; }
  // Largest channel rate times ||O^dag O|| plus ||H||; sets default step sizes.
  double rate_scale() const { return rate_scale_; }

  Matrix apply(const Matrix& rho) const;

 private:
  Dims dims_;
  Matrix m_;
  double rate_scale_;
};

Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, std::size_t d);

// drho/dt = -i[H, rho] + sum_k rate_k D(jump_k)
Liouvillian build_liouvillian(const Operator& h, std::span<const LindbladChannel> channels);
Liouvillian build_liouvillian(const Dims& dims, std::span<const LindbladChannel> channels);

enum class EvolveMethod { rk4_fixed, rk4_adaptive };

struct EvolveControl {
  double dt = 0.0;  // 0 selects 0.02 / rate_scale
  double t_final = 0.0;
  EvolveMethod method = EvolveMethod::rk4_fixed;
  double trace_tol = 1e-8;
  double hermitian_tol = 1e-8;
  double step_tol = 1e-10;          // local error target for rk4_adaptive
  std::size_t snapshot_every = 0;   // accepted steps between snapshots; 0 keeps only the ends
};

struct Snapshot {
  double t;
  DensityMatrix rho;
};

std::vector<Snapshot> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                             const EvolveControl& ctrl);

struct SteadyStateOptions {
  double uniqueness_ratio = 1e-8;
  double residual_tol = 1e-10;
};

struct SteadyState {
  DensityMatrix rho;
  double residual;   // ||L vec(rho)||_2
  double gap_ratio;  // second-smallest over largest singular value
};

SteadyState steady_state(const Liouvillian& l, const SteadyStateOptions& opts = {});

// Nearest-neighbour birth-death chain on levels 0..size()-1.
struct RateChain {
  std::vector<double> up;    // up[n]: n -> n+1
  std::vector<double> down;  // down[n]: n -> n-1
  std::size_t extra_level = 0;  // extra decay j+1 -> j at rate extra_rate
  double extra_rate = 0.0;

  std::size_t size() const { return up.size(); }
  double down_total(std::size_t n) const;
};

RateChain thermal_selective_chain(const SelectiveDamping& s, std::size_t n_levels);

// Stationary law by detailed-balance products. Throws ReducibleChainError when
// any link has a zero rate.
PhononDistribution chain_steady_state(const RateChain& chain);

// Grows the chain until p_{N-1} (nbar_p + 1) < tail_tol.
PhononDistribution chain_steady_state(const SelectiveDamping& s, double tail_tol = 1e-12);

// Channels of the engineered phonon-only master equation on n_c levels.
std::vector<LindbladChannel> effective_channels(const SelectiveDamping& s, std::size_t n_c);

// Cavity decays kappa_a/2 D(a), kappa_b/2 D(b) plus thermal phonon channels on
// dims {2, 2, n_c}.
std::vector<LindbladChannel> full_model_channels(const SystemParams& p, std::size_t n_c);

}  // namespace optomech
