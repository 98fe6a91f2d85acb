#pragma once

#include "qbm/opalg.hpp"

#include <cmath>
#include <random>

namespace qbm::testing {

inline ComplexMatrix random_complex(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  const ComplexMatrix m = random_complex(rng, n);
  return scale * 0.5 * (m + m.adjoint());
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_complex(rng, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

/// Full-rank density matrix with spectrum bounded away from zero.
inline DensityMatrix random_density(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RealVector p(n);
  for (Eigen::Index i = 0; i < n; ++i) p(i) = u(rng);
  p /= p.sum();
  const ComplexMatrix v = random_unitary(rng, n);
  ComplexMatrix m = v * p.asDiagonal() * v.adjoint();
  return DensityMatrix(0.5 * (m + m.adjoint()));
}

inline ComplexVector basis_ket(Eigen::Index n, Eigen::Index k) {
  ComplexVector v = ComplexVector::Zero(n);
  v(k) = 1.0;
  return v;
}

inline double frob(const ComplexMatrix& a) { return a.norm(); }

}  // namespace qbm::testing
