#include "macroreal/hilbert.hpp"

#include <algorithm>
#include <cmath>

namespace macroreal {

namespace {

bool all_finite(const Matrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

}  // namespace

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DimensionError("operator must be square");
  if (m_.rows() == 0) throw DimensionError("operator dimension must be positive");
  if (!all_finite(m_)) throw std::domain_error("operator has non-finite entries");
}

Operator Operator::identity(std::size_t dim) {
  return Operator(Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

Operator Operator::zero(std::size_t dim) {
  return Operator(Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

bool Operator::is_hermitian(double tol) const { return operator_norm(m_ - m_.adjoint()) <= tol; }

bool Operator::is_unitary(double tol) const {
  return operator_norm(m_.adjoint() * m_ - Matrix::Identity(m_.rows(), m_.cols())) <= tol;
}

StateVector::StateVector(Vector amplitudes, double tol) : v_(std::move(amplitudes)), tol_(tol) {
  if (v_.size() == 0) throw DimensionError("state dimension must be positive");
  if (std::abs(v_.squaredNorm() - 1.0) > tol) throw std::domain_error("state vector is not normalized");
}

DensityState::DensityState(Matrix rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) throw DimensionError("density matrix must be square");
  if (!all_finite(rho_)) throw std::domain_error("density matrix has non-finite entries");
  if (operator_norm(rho_ - rho_.adjoint()) > tol) throw std::domain_error("density matrix is not Hermitian");
  if (std::abs(rho_.trace() - Complex(1.0)) > tol) throw std::domain_error("density matrix trace is not 1");
  const Matrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw std::domain_error("density matrix has a negative eigenvalue");
}

DensityState DensityState::pure(const StateVector& psi) {
  return DensityState(psi.amplitudes() * psi.amplitudes().adjoint(), psi.norm_tolerance() * 2 + 1e-12);
}

DensityState DensityState::pure(const Vector& psi, double tol) {
  return DensityState(psi * psi.adjoint(), tol);
}

std::size_t default_fock_dim(double r) {
  return static_cast<std::size_t>(std::ceil(r * r + 8.0 * r + 20.0));
}

Vector projected_coherent_amplitudes(Complex gamma, std::size_t dim) {
  Vector c(static_cast<Eigen::Index>(dim));
  const double r = std::abs(gamma);
  if (r == 0.0) {
    c.setZero();
    if (dim > 0) c(0) = 1.0;
    return c;
  }
  const double log_r = std::log(r);
  const double theta = std::arg(gamma);
  for (std::size_t k = 0; k < dim; ++k) {
    const double kd = static_cast<double>(k);
    const double log_mag = -0.5 * r * r + kd * log_r - 0.5 * std::lgamma(kd + 1.0);
    c(static_cast<Eigen::Index>(k)) = std::polar(std::exp(log_mag), kd * theta);
  }
  return c;
}

StateVector coherent_state(Complex gamma, std::size_t dim, double max_truncation_loss) {
  if (dim < 1) throw DimensionError("coherent_state: dim must be >= 1");
  Vector c = projected_coherent_amplitudes(gamma, dim);
  const double kept = c.squaredNorm();
  // The tail sum is evaluated directly so that losses far below the
  // double-precision resolution of 1 - kept are still reported.
  double tail = 0.0;
  const double r = std::abs(gamma);
  if (r > 0.0) {
    const double log_r = std::log(r);
    for (std::size_t k = dim; k < dim + 4000; ++k) {
      const double kd = static_cast<double>(k);
      const double term = std::exp(-r * r + 2.0 * kd * log_r - std::lgamma(kd + 1.0));
      tail += term;
      if (kd > r * r && term < 1e-300) break;
    }
  }
  if (tail > max_truncation_loss)
    throw TruncationError("coherent_state: truncation loss " + std::to_string(tail) + " exceeds ceiling");
  StateVector s;
  s.v_ = c / std::sqrt(kept);
  s.tol_ = 1e-10;
  s.truncation_loss_ = tail;
  return s;
}

Operator fock_projector(std::size_t k, std::size_t dim) {
  if (k >= dim) throw DimensionError("fock_projector: index out of range");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
  return Operator(std::move(m));
}

HermitianEigen hermitian_eigen(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

Operator unitary_from_hamiltonian(const Operator& h, double t, double tol) {
  if (!h.is_hermitian(tol)) throw DimensionError("unitary_from_hamiltonian: H is not Hermitian");
  const auto eig = hermitian_eigen(h.matrix());
  return Operator(hermitian_function(eig, [t](double e) { return std::polar(1.0, -e * t); }));
}

Operator annihilation(std::size_t dim) {
  Matrix a = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t k = 1; k < dim; ++k)
    a(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(static_cast<double>(k));
  return Operator(std::move(a));
}

Quadratures quadrature_operators(std::size_t dim) {
  if (dim < 2) throw DimensionError("quadrature_operators: dim must be >= 2");
  const Matrix a = annihilation(dim).matrix();
  const double s = 1.0 / std::sqrt(2.0);
  Matrix x = s * (a + a.adjoint());
  Matrix p = Complex(0.0, -s) * (a - a.adjoint());
  return {Operator(std::move(x)), Operator(std::move(p))};
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 || m.cols() == 1) return m.norm();
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix inverse_sqrt_psd(const Matrix& s, double min_eigenvalue) {
  const auto eig = hermitian_eigen(s);
  if (eig.values.minCoeff() < min_eigenvalue) throw DimensionError("matrix is singular or not positive definite");
  return hermitian_function(eig, [](double e) { return Complex(1.0 / std::sqrt(e)); });
}

Matrix sqrt_psd(const Matrix& s) {
  const auto eig = hermitian_eigen(s);
  return hermitian_function(eig, [](double e) { return Complex(std::sqrt(std::max(e, 0.0))); });
}

}  // namespace macroreal
