#pragma once

// Dense complex linear algebra on truncated Hilbert spaces (hbar = 1).

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace macroreal {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Default tolerances. Structural checks (hermiticity, unitarity,
/// completeness) use `structural`; discretized-physics checks use `physics`.
struct Tolerances {
  double structural = 1e-10;
  double physics = 1e-6;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m);

  static Operator identity(std::size_t dim);
  static Operator zero(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  bool is_hermitian(double tol = 1e-10) const;
  bool is_unitary(double tol = 1e-10) const;

  Operator adjoint() const { return Operator(m_.adjoint()); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    return Operator(a.m_ * b.m_);
  }

 private:
  Matrix m_;
};

class StateVector {
 public:
  StateVector() = default;
  /// Throws if the squared norm deviates from 1 by more than `tol`.
  StateVector(Vector amplitudes, double tol = 1e-10);

  std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
  const Vector& amplitudes() const { return v_; }
  double norm_tolerance() const { return tol_; }
  /// 1 - sum |c_k|^2 of the untruncated amplitudes this state was cut from.
  double truncation_loss() const { return truncation_loss_; }

  Complex inner(const StateVector& other) const { return v_.dot(other.v_); }

 private:
  friend StateVector coherent_state(Complex, std::size_t, double);
  Vector v_;
  double tol_ = 1e-10;
  double truncation_loss_ = 0.0;
};

class DensityState {
 public:
  DensityState() = default;
  /// Validates hermiticity, positivity and unit trace within `tol`.
  explicit DensityState(Matrix rho, double tol = 1e-10);
  static DensityState pure(const StateVector& psi);
  static DensityState pure(const Vector& psi, double tol = 1e-10);

  std::size_t dim() const { return static_cast<std::size_t>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }

 private:
  Matrix rho_;
};

/// Number of Fock levels kept for a coherent amplitude of modulus r:
/// ceil(r^2 + 8 r + 20).
std::size_t default_fock_dim(double abs_gamma);

/// Renormalized truncated coherent state. Throws TruncationError when the
/// discarded tail mass exceeds `max_truncation_loss`.
StateVector coherent_state(Complex gamma, std::size_t dim, double max_truncation_loss = 1e-6);

/// Projection of |gamma> onto the first `dim` Fock levels, not renormalized.
/// This is the form that makes the lattice resolution of identity converge.
Vector projected_coherent_amplitudes(Complex gamma, std::size_t dim);

Operator fock_projector(std::size_t k, std::size_t dim);

/// Eigendecomposition of a Hermitian operator.
struct HermitianEigen {
  RealVector values;
  Matrix vectors;
};
HermitianEigen hermitian_eigen(const Matrix& h);

/// f(H) for Hermitian H through its eigendecomposition.
template <class F>
Matrix hermitian_function(const HermitianEigen& eig, F&& f) {
  Vector fv(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) fv(i) = f(eig.values(i));
  return eig.vectors * fv.asDiagonal() * eig.vectors.adjoint();
}

/// exp(-i H t). Throws DimensionError when H is not Hermitian within `tol`.
Operator unitary_from_hamiltonian(const Operator& h, double t, double tol = 1e-10);

struct Quadratures {
  Operator x;
  Operator p;
};
/// X = (a + a^dag)/sqrt2 and P = (a - a^dag)/(i sqrt2) in the Fock basis.
Quadratures quadrature_operators(std::size_t dim);

Operator annihilation(std::size_t dim);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// Inverse square root of a positive definite Hermitian matrix. Throws
/// DimensionError when the smallest eigenvalue is below `min_eigenvalue`.
Matrix inverse_sqrt_psd(const Matrix& s, double min_eigenvalue = 1e-14);
Matrix sqrt_psd(const Matrix& s);

}  // namespace macroreal
