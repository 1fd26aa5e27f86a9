#pragma once

// Truncated Fock-space operator algebra.
//
// Composite spaces are ordered with the first factor as the slowest index,
// so for modes a (x) b (x) c the basis index is (n_a * d_b + n_b) * d_c + n_c.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace optomech {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

class FockSpace {
 public:
  explicit FockSpace(std::size_t dim);
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

class Operator {
 public:
  Operator(Dims dims, Matrix m);

  static Operator identity(const Dims& dims);
  static Operator zero(const Dims& dims);

  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  Operator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;

  Operator& operator+=(const Operator& o);
  Operator& operator-=(const Operator& o);
  Operator& operator*=(cplx s);

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(Operator a, cplx s) { return a *= s; }
  friend Operator operator*(cplx s, Operator a) { return a *= s; }
  friend Operator operator*(const Operator& a, const Operator& b);

 private:
  Dims dims_;
  Matrix m_;
};

std::size_t total_dim(const Dims& dims);

// <n-1|c|n> = sqrt(n)
Operator annihilation(const FockSpace& space);
Operator creation(const FockSpace& space);
Operator number(const FockSpace& space);
Operator identity(const FockSpace& space);

// |j><k|
Operator projector_transfer(const FockSpace& space, std::size_t j, std::size_t k);

// Kronecker product; dims are concatenated.
Operator tensor(const Operator& a, const Operator& b);
Operator tensor(std::span<const Operator> factors);

// Lifts a single-mode operator into the composite space described by dims.
Operator embed(const Operator& local, std::size_t mode, const Dims& dims);

struct DensityTolerance {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double psd = 1e-8;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and numerical positivity.
  explicit DensityMatrix(Operator rho, DensityTolerance tol = {});

  static DensityMatrix basis_state(const Dims& dims, std::size_t index);
  // Fock-diagonal single-mode state.
  static DensityMatrix diagonal(std::span<const double> populations);

  const Operator& op() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }
  const Dims& dims() const { return rho_.dims(); }
  std::size_t dim() const { return rho_.dim(); }

  double trace() const;
  double min_eigenvalue() const;
  std::vector<double> populations() const;

 private:
  Operator rho_;
};

// 2 O rho O^dag - rho O^dag O - O^dag O rho
Matrix dissipator(const Operator& o, const DensityMatrix& rho);
Matrix dissipator(const Operator& o, const Matrix& rho);

// Diagonal of the reduced state of one mode.
std::vector<double> diagonal_marginal(const DensityMatrix& rho, std::size_t mode);

}  // namespace optomech
