#include "qbm/opalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbm {

namespace {

void require_square_finite(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

double hermitian_residual(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

HermitianOperator::HermitianOperator(ComplexMatrix m) : m_(std::move(m)) {
  require_square_finite(m_, "HermitianOperator");
  if (hermitian_residual(m_) > kHermitianTol) {
    throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
  }
}

HermitianOperator HermitianOperator::trusted(ComplexMatrix m) {
  return HermitianOperator(std::move(m), TrustedTag{});
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  require_square_finite(m_, "DensityMatrix");
  if (hermitian_residual(m_) > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: matrix is not Hermitian");
  }
  if (std::abs(m_.trace().real() - 1.0) > kTraceTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from one");
  }
  const auto eig = herm_eig(m_);
  if (eig.values.minCoeff() < -kPsdTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::trusted(ComplexMatrix m) {
  return DensityMatrix(std::move(m), TrustedTag{});
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return trusted(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

PureState::PureState(ComplexVector amplitudes) : v_(std::move(amplitudes)) {
  if (v_.size() == 0 || !v_.allFinite()) {
    throw std::invalid_argument("PureState: empty or non-finite amplitudes");
  }
  if (std::abs(v_.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("PureState: amplitudes are not normalized");
  }
}

DensityMatrix PureState::projector() const {
  return DensityMatrix::trusted(v_ * v_.adjoint());
}

namespace pauli {
ComplexMatrix identity() { return ComplexMatrix::Identity(2, 2); }
ComplexMatrix x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
ComplexMatrix y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
ComplexMatrix z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
}  // namespace pauli

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols()) {
    throw std::invalid_argument("kron: operands must be square");
  }
  const Eigen::Index na = a.rows();
  const Eigen::Index nb = b.rows();
  ComplexMatrix out(na * nb, na * nb);
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      out.block(i * nb, j * nb, nb, nb) = a(i, j) * b;
    }
  }
  return out;
}

HermitianOperator pauli_string(std::string_view labels, int n_sites) {
  if (n_sites < 1 || static_cast<int>(labels.size()) != n_sites) {
    throw std::invalid_argument("pauli_string: label count must equal n_sites");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (char c : labels) {
    ComplexMatrix site;
    switch (c) {
      case 'I': site = pauli::identity(); break;
      case 'X': site = pauli::x(); break;
      case 'Y': site = pauli::y(); break;
      case 'Z': site = pauli::z(); break;
      default:
        throw std::invalid_argument(std::string("pauli_string: unknown label '") + c + "'");
    }
    out = kron(out, site);
  }
  return HermitianOperator::trusted(std::move(out));
}

EigenDecomposition herm_eig(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw EigenSolverError("herm_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

HermitianOperator expm_hermitian(const HermitianOperator& h, bool normalized) {
  const auto eig = herm_eig(h);
  const double shift = eig.values.maxCoeff();
  if (!normalized && shift > 700.0) {
    throw std::range_error("expm_hermitian: exponent overflows double precision");
  }
  ComplexMatrix e = spectral_apply(eig, [shift](double v) { return std::exp(v - shift); });
  if (normalized) {
    e /= e.trace().real();
  } else {
    e *= std::exp(shift);
  }
  // Symmetrize away the roundoff so the Hermitian invariant holds exactly.
  ComplexMatrix sym = 0.5 * (e + e.adjoint());
  return HermitianOperator::trusted(std::move(sym));
}

ComplexMatrix partial_trace_last(const ComplexMatrix& m, Eigen::Index dim_v, Eigen::Index dim_h) {
  if (dim_v < 1 || dim_h < 1 || m.rows() != dim_v * dim_h || m.cols() != m.rows()) {
    throw std::invalid_argument("partial_trace_last: dimension mismatch");
  }
  ComplexMatrix out = ComplexMatrix::Zero(dim_v, dim_v);
  for (Eigen::Index i = 0; i < dim_v; ++i) {
    for (Eigen::Index j = 0; j < dim_v; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index k = 0; k < dim_h; ++k) {
        acc += m(i * dim_h + k, j * dim_h + k);
      }
      out(i, j) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace_last(const DensityMatrix& rho, Eigen::Index dim_v, Eigen::Index dim_h) {
  return DensityMatrix::trusted(partial_trace_last(rho.matrix(), dim_v, dim_h));
}

double entropy_nats_of_spectrum(const RealVector& p) {
  double s = 0.0;
  for (double v : p) {
    if (v > kEntropyClamp) s -= v * std::log(v);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  return nats_to_bits(entropy_nats_of_spectrum(herm_eig(rho.matrix()).values));
}

double relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho) {
  if (sigma.dim() != rho.dim()) {
    throw std::invalid_argument("relative_entropy: dimension mismatch");
  }
  const auto er = herm_eig(rho.matrix());
  if (er.values.minCoeff() < kSupportFloor) {
    throw SupportError("relative_entropy: second state is not full rank");
  }
  const double neg_entropy = -entropy_nats_of_spectrum(herm_eig(sigma.matrix()).values);
  // Tr(sigma ln rho) = sum_x <x|sigma|x> ln r_x in the eigenbasis of rho.
  const ComplexMatrix rotated = er.vectors.adjoint() * sigma.matrix() * er.vectors;
  double cross = 0.0;
  for (Eigen::Index x = 0; x < rotated.rows(); ++x) {
    cross += rotated(x, x).real() * std::log(er.values(x));
  }
  return nats_to_bits(neg_entropy - cross);
}

double fidelity_pure(const PureState& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) {
    throw std::invalid_argument("fidelity_pure: dimension mismatch");
  }
  const double f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
  return std::clamp(f, 0.0, 1.0);
}

double trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(ab) = sum_ij a_ij b_ji
  return (a.transpose().cwiseProduct(b)).sum().real();
}

}  // namespace qbm
