#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "macroreal/hilbert.hpp"

namespace testing {

using macroreal::Complex;
using macroreal::Matrix;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

inline Matrix random_unitary(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ();
}

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
/// Projector onto the +-1 eigenspace of a Pauli matrix.
inline Matrix pauli_projector(const Matrix& s, double sign) {
  return (Matrix::Identity(2, 2) + sign * s) / 2.0;
}

}  // namespace testing
