#include "qbm/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qbm {

OperatorBasis::OperatorBasis(std::vector<HermitianOperator> ops, std::vector<std::string> labels)
    : ops_(std::move(ops)), labels_(std::move(labels)) {
  if (ops_.empty()) throw std::invalid_argument("OperatorBasis: empty basis");
  if (ops_.size() != labels_.size()) throw std::invalid_argument("OperatorBasis: label count mismatch");
  const Eigen::Index d = ops_.front().dim();
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    if (ops_[i].dim() != d) throw std::invalid_argument("OperatorBasis: mixed operator dimensions");
    if (std::abs(ops_[i].matrix().trace()) > kHermitianTol) {
      throw std::invalid_argument("OperatorBasis: operator " + labels_[i] + " is not traceless");
    }
  }
  const auto n = static_cast<Eigen::Index>(ops_.size());
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      gram(i, j) = trace_product(ops_[i].matrix(), ops_[j].matrix());
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * hi)) {
    throw std::invalid_argument("OperatorBasis: operators are linearly dependent");
  }
}

ParamVector::ParamVector(RealVector values) : v_(std::move(values)) {
  if (!v_.allFinite()) throw std::invalid_argument("ParamVector: non-finite entry");
}

ParamVector::ParamVector(std::initializer_list<double> values)
    : ParamVector(RealVector(Eigen::Map<const RealVector>(values.begin(), static_cast<Eigen::Index>(values.size())))) {}

QbmModel::QbmModel(OperatorBasis basis, Eigen::Index dim_v, Eigen::Index dim_h)
    : basis_(std::move(basis)), dim_v_(dim_v), dim_h_(dim_h) {
  if (dim_v < 1 || dim_h < 1 || basis_.dim() != dim_v * dim_h) {
    throw std::invalid_argument("QbmModel: operator dimension must equal dim_v * dim_h");
  }
}

namespace {

OperatorBasis pauli_basis(const std::vector<std::string>& strings, const std::vector<std::string>& labels) {
  std::vector<HermitianOperator> ops;
  ops.reserve(strings.size());
  for (const auto& s : strings) ops.push_back(pauli_string(s, static_cast<int>(s.size())));
  return OperatorBasis(std::move(ops), labels);
}

void require_params(const QbmModel& model, const ParamVector& a) {
  if (a.size() != model.n_params()) {
    throw std::invalid_argument("parameter vector length does not match the operator basis");
  }
}

}  // namespace

QbmModel visible_model_2q() {
  return QbmModel(pauli_basis({"XI", "IX", "ZI", "IZ", "ZZ"}, {"X1", "X2", "Z1", "Z2", "Z1Z2"}), 4, 1);
}

QbmModel hidden_model_3q() {
  return QbmModel(pauli_basis({"XII", "IXI", "IIX", "ZII", "IZI", "IIZ", "IZZ", "ZIZ", "ZZI"},
                              {"X1", "X2", "X3", "Z1", "Z2", "Z3", "Z2Z3", "Z1Z3", "Z1Z2"}),
                  4, 2);
}

HermitianOperator generator(const QbmModel& model, const ParamVector& a) {
  require_params(model, a);
  ComplexMatrix m = ComplexMatrix::Zero(model.dim(), model.dim());
  for (std::size_t i = 0; i < a.size(); ++i) m += a[i] * model.basis().op(i).matrix();
  return HermitianOperator::trusted(std::move(m));
}

HermitianOperator hamiltonian(const QbmModel& model, const ParamVector& a) {
  return HermitianOperator::trusted(-generator(model, a).matrix());
}

GibbsState gibbs_state(const QbmModel& model, const ParamVector& a) {
  const auto eig = herm_eig(generator(model, a));
  const double shift = eig.values.maxCoeff();
  RealVector w = (eig.values.array() - shift).exp();
  const double z = w.sum();
  // Vectorized exp flushes to subnormals rather than zero.
  const int nonzero = static_cast<int>((w.array() >= std::numeric_limits<double>::min()).count());
  w /= z;
  ComplexMatrix rho = eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return {DensityMatrix::trusted(std::move(rho)), nonzero <= 1};
}

DensityMatrix boltzmann_state(const QbmModel& model, const ParamVector& a) {
  return gibbs_state(model, a).state;
}

DensityMatrix visible_state(const QbmModel& model, const ParamVector& a) {
  auto rho = boltzmann_state(model, a);
  if (!model.has_hidden()) return rho;
  return partial_trace_last(rho, model.dim_v(), model.dim_h());
}

TargetState target_state(double r, double phi) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("target_state: r must lie in [0, 1]");
  if (!std::isfinite(phi)) throw std::invalid_argument("target_state: phi must be finite");
  const double two_pi = 2.0 * std::numbers::pi;
  double reduced = std::fmod(phi, two_pi);
  if (reduced < 0.0) reduced += two_pi;
  const double s = std::sqrt(1.0 - r * r) / std::numbers::sqrt2;
  ComplexVector v(4);
  v << r * std::cos(phi), s, s, r * std::sin(phi);
  // Normalize away the last-ulp drift of the trig evaluations.
  v /= v.norm();
  return {r, reduced, PureState(std::move(v))};
}

std::vector<double> moments(const DensityMatrix& rho, const OperatorBasis& basis) {
  if (rho.dim() != basis.dim()) throw std::invalid_argument("moments: dimension mismatch");
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& op : basis.ops()) out.push_back(trace_product(rho.matrix(), op.matrix()));
  return out;
}

HermitianOperator embed_visible(const HermitianOperator& op, Eigen::Index dim_h) {
  return HermitianOperator::trusted(kron(op.matrix(), ComplexMatrix::Identity(dim_h, dim_h)));
}

}  // namespace qbm
