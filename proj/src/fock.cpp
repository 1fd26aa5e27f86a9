#include "optomech/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "optomech/errors.hpp"

namespace optomech {

FockSpace::FockSpace(std::size_t dim) : dim_(dim) {
  if (dim < 2) {
    throw InvalidSpaceError("Fock space dimension must be >= 2, got " + std::to_string(dim));
  }
}

std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

Operator::Operator(Dims dims, Matrix m) : dims_(std::move(dims)), m_(std::move(m)) {
  if (m_.rows() != m_.cols()) {
    throw ShapeError("operator matrix must be square");
  }
  if (dims_.empty() || total_dim(dims_) != static_cast<std::size_t>(m_.rows())) {
    throw ShapeError("operator matrix size " + std::to_string(m_.rows()) +
                     " does not match the product of its space dimensions");
  }
}

Operator Operator::identity(const Dims& dims) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  return Operator(dims, Matrix::Identity(n, n));
}

Operator Operator::zero(const Dims& dims) {
  const auto n = static_cast<Eigen::Index>(total_dim(dims));
  return Operator(dims, Matrix::Zero(n, n));
}

Operator Operator::adjoint() const { return Operator(dims_, m_.adjoint()); }

bool Operator::is_hermitian(double tol) const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Operator& Operator::operator+=(const Operator& o) {
  if (dims_ != o.dims_) throw ShapeError("operator sum over different spaces");
  m_ += o.m_;
  return *this;
}

Operator& Operator::operator-=(const Operator& o) {
  if (dims_ != o.dims_) throw ShapeError("operator difference over different spaces");
  m_ -= o.m_;
  return *this;
}

Operator& Operator::operator*=(cplx s) {
  m_ *= s;
  return *this;
}

Operator operator*(const Operator& a, const Operator& b) {
  if (a.dims_ != b.dims_) throw ShapeError("operator product over different spaces");
  return Operator(a.dims_, a.m_ * b.m_);
}

Operator annihilation(const FockSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(static_cast<double>(k));
  return Operator({space.dim()}, std::move(m));
}

Operator creation(const FockSpace& space) { return annihilation(space).adjoint(); }

Operator number(const FockSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
  return Operator({space.dim()}, std::move(m));
}

Operator identity(const FockSpace& space) { return Operator::identity({space.dim()}); }

Operator projector_transfer(const FockSpace& space, std::size_t j, std::size_t k) {
  if (j >= space.dim() || k >= space.dim()) {
    throw IndexError("level out of range: |" + std::to_string(j) + "><" + std::to_string(k) +
                     "| on dimension " + std::to_string(space.dim()));
  }
  Operator op = Operator::zero({space.dim()});
  Matrix m = op.matrix();
  m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = 1.0;
  return Operator({space.dim()}, std::move(m));
}

Operator tensor(const Operator& a, const Operator& b) {
  const Matrix& A = a.matrix();
  const Matrix& B = b.matrix();
  Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  Dims dims = a.dims();
  dims.insert(dims.end(), b.dims().begin(), b.dims().end());
  return Operator(std::move(dims), std::move(out));
}

Operator tensor(std::span<const Operator> factors) {
  if (factors.empty()) throw ShapeError("tensor of an empty operator list");
  Operator out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
  return out;
}

Operator embed(const Operator& local, std::size_t mode, const Dims& dims) {
  if (mode >= dims.size()) throw IndexError("mode index out of range");
  if (local.dims().size() != 1 || local.dim() != dims[mode]) {
    throw ShapeError("local operator does not match mode dimension");
  }
  std::vector<Operator> factors;
  factors.reserve(dims.size());
  for (std::size_t k = 0; k < dims.size(); ++k) {
    factors.push_back(k == mode ? local : Operator::identity({dims[k]}));
  }
  return tensor(factors);
}

DensityMatrix::DensityMatrix(Operator rho, DensityTolerance tol) : rho_(std::move(rho)) {
  const Matrix& m = rho_.matrix();
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol.hermitian) {
    throw Error("density matrix is not Hermitian");
  }
  if (std::abs(trace() - 1.0) > tol.trace) {
    throw Error("density matrix trace " + std::to_string(trace()) + " differs from 1");
  }
  if (min_eigenvalue() < -tol.psd) {
    throw Error("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::basis_state(const Dims& dims, std::size_t index) {
  Operator z = Operator::zero(dims);
  if (index >= z.dim()) throw IndexError("basis index out of range");
  Matrix m = z.matrix();
  const auto i = static_cast<Eigen::Index>(index);
  m(i, i) = 1.0;
  return DensityMatrix(Operator(dims, std::move(m)));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> populations) {
  const auto n = static_cast<Eigen::Index>(populations.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = populations[static_cast<std::size_t>(k)];
  return DensityMatrix(Operator({populations.size()}, std::move(m)));
}

double DensityMatrix::trace() const { return rho_.matrix().trace().real(); }

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (rho_.matrix() + rho_.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(dim());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    p[k] = rho_.matrix()(i, i).real();
  }
  return p;
}

Matrix dissipator(const Operator& o, const Matrix& rho) {
  if (static_cast<Eigen::Index>(o.dim()) != rho.rows() || rho.rows() != rho.cols()) {
    throw ShapeError("dissipator operand dimensions differ");
  }
  const Matrix& O = o.matrix();
  const Matrix Od = O.adjoint();
  const Matrix OdO = Od * O;
  return 2.0 * O * rho * Od - rho * OdO - OdO * rho;
}

Matrix dissipator(const Operator& o, const DensityMatrix& rho) {
  if (o.dims() != rho.dims()) throw ShapeError("dissipator operand spaces differ");
  return dissipator(o, rho.matrix());
}

std::vector<double> diagonal_marginal(const DensityMatrix& rho, std::size_t mode) {
  const Dims& dims = rho.dims();
  if (mode >= dims.size()) throw IndexError("mode index out of range");
  std::size_t inner = 1;
  for (std::size_t k = mode + 1; k < dims.size(); ++k) inner *= dims[k];
  const std::size_t d = dims[mode];
  std::vector<double> out(d, 0.0);
  const Matrix& m = rho.matrix();
  for (std::size_t idx = 0; idx < rho.dim(); ++idx) {
    const std::size_t level = (idx / inner) % d;
    const auto i = static_cast<Eigen::Index>(idx);
    out[level] += m(i, i).real();
  }
  return out;
}

}  // namespace optomech
