#pragma once

// Dense complex operator algebra for few-qubit systems.

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qbm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Thrown when a relative entropy is requested against a state whose
/// support does not cover the first argument.
class SupportError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when the Hermitian eigensolver fails to converge.
class EigenSolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kEntropyClamp = 1e-14;
inline constexpr double kSupportFloor = 1e-13;

class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Validates square shape, finiteness and Hermiticity (1e-12 entrywise).
  explicit HermitianOperator(ComplexMatrix m);

  /// Skips validation; the caller guarantees Hermiticity by construction.
  static HermitianOperator trusted(ComplexMatrix m);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  struct TrustedTag {};
  HermitianOperator(ComplexMatrix m, TrustedTag) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class DensityMatrix {
 public:
  DensityMatrix() = default;
  /// Validates Hermiticity, unit trace (1e-10) and eigenvalues >= -1e-10.
  explicit DensityMatrix(ComplexMatrix m);

  static DensityMatrix trusted(ComplexMatrix m);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const ComplexMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  struct TrustedTag {};
  DensityMatrix(ComplexMatrix m, TrustedTag) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

class PureState {
 public:
  PureState() = default;
  /// Rejects vectors whose norm differs from one by more than 1e-10.
  explicit PureState(ComplexVector amplitudes);

  const ComplexVector& amplitudes() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  DensityMatrix projector() const;

 private:
  ComplexVector v_;
};

struct EigenDecomposition {
  RealVector values;     // ascending
  ComplexMatrix vectors;  // columns are eigenvectors
};

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Tensor product of single-site Paulis; qubit 1 is the leftmost factor.
/// Each label must be one of 'I', 'X', 'Y', 'Z'.
HermitianOperator pauli_string(std::string_view labels, int n_sites);

EigenDecomposition herm_eig(const ComplexMatrix& h);
inline EigenDecomposition herm_eig(const HermitianOperator& h) { return herm_eig(h.matrix()); }

/// V f(diag) V† for a real function f of the spectrum.
template <typename Fn>
ComplexMatrix spectral_apply(const EigenDecomposition& eig, Fn&& fn) {
  RealVector f = eig.values.unaryExpr(std::forward<Fn>(fn));
  return eig.vectors * f.asDiagonal() * eig.vectors.adjoint();
}

/// Matrix exponential of a Hermitian operator.
///
/// The spectrum is shifted by its maximum before exponentiating. With
/// `normalized` the result is divided by its trace and the shift cancels;
/// otherwise exp(shift) is reinstated, which throws std::range_error when
/// the spectral spread would overflow.
HermitianOperator expm_hermitian(const HermitianOperator& h, bool normalized = false);

/// Traces out the last tensor factor of dimension `dim_h`.
ComplexMatrix partial_trace_last(const ComplexMatrix& m, Eigen::Index dim_v, Eigen::Index dim_h);
DensityMatrix partial_trace_last(const DensityMatrix& rho, Eigen::Index dim_v, Eigen::Index dim_h);

/// Von Neumann entropy in bits.
double von_neumann_entropy(const DensityMatrix& rho);

/// S(sigma | rho) = Tr sigma (log2 sigma - log2 rho) in bits.
/// Throws SupportError if rho has an eigenvalue below 1e-13.
double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho);

/// <psi| rho |psi>, clamped into [0, 1].
double fidelity_pure(const PureState& psi, const DensityMatrix& rho);

/// Tr(a b), real part; both operators Hermitian.
double trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Natural-log entropy -sum p ln p with the 0 ln 0 = 0 convention.
double entropy_nats_of_spectrum(const RealVector& p);

inline constexpr double kLn2 = 0.69314718055994530942;
inline double nats_to_bits(double nats) { return nats / kLn2; }

}  // namespace qbm
