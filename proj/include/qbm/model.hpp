#pragma once

// Boltzmann-machine model families and the two-qubit target family.

#include "qbm/opalg.hpp"

#include <string>
#include <vector>

namespace qbm {

/// Ordered list of traceless, linearly independent Hermitian operators.
class OperatorBasis {
 public:
  OperatorBasis() = default;
  /// Throws std::invalid_argument on empty input, size mismatch, mixed
  /// dimensions, non-traceless operators or a singular Gram matrix.
  OperatorBasis(std::vector<HermitianOperator> ops, std::vector<std::string> labels);

  std::size_t size() const { return ops_.size(); }
  Eigen::Index dim() const { return ops_.empty() ? 0 : ops_.front().dim(); }
  const HermitianOperator& op(std::size_t i) const { return ops_.at(i); }
  const std::vector<HermitianOperator>& ops() const { return ops_; }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<HermitianOperator> ops_;
  std::vector<std::string> labels_;
};

/// Real coefficient vector of the Hamiltonian expansion, finite entries.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(RealVector values);
  ParamVector(std::initializer_list<double> values);
  static ParamVector zeros(std::size_t n) { return ParamVector(RealVector::Zero(static_cast<Eigen::Index>(n))); }
  static ParamVector constant(std::size_t n, double c) {
    return ParamVector(RealVector::Constant(static_cast<Eigen::Index>(n), c));
  }

  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }
  double operator[](std::size_t i) const { return v_(static_cast<Eigen::Index>(i)); }
  const RealVector& values() const { return v_; }
  ParamVector operator-() const { return ParamVector(RealVector(-v_)); }

 private:
  RealVector v_;
};

class QbmModel {
 public:
  QbmModel() = default;
  QbmModel(OperatorBasis basis, Eigen::Index dim_v, Eigen::Index dim_h);

  const OperatorBasis& basis() const { return basis_; }
  Eigen::Index dim_v() const { return dim_v_; }
  Eigen::Index dim_h() const { return dim_h_; }
  Eigen::Index dim() const { return dim_v_ * dim_h_; }
  std::size_t n_params() const { return basis_.size(); }
  bool has_hidden() const { return dim_h_ > 1; }

 private:
  OperatorBasis basis_;
  Eigen::Index dim_v_ = 0;
  Eigen::Index dim_h_ = 1;
};

/// Two visible qubits: X1, X2, Z1, Z2, Z1Z2.
QbmModel visible_model_2q();

/// Two visible qubits plus a hidden third qubit:
/// X1, X2, X3, Z1, Z2, Z3, Z2Z3, Z1Z3, Z1Z2.
QbmModel hidden_model_3q();

/// a.O
HermitianOperator generator(const QbmModel& model, const ParamVector& a);
/// H(a) = -a.O
HermitianOperator hamiltonian(const QbmModel& model, const ParamVector& a);

struct GibbsState {
  DensityMatrix state;
  /// All but one Boltzmann weight underflowed relative to the largest.
  bool rank_deficient = false;
};

GibbsState gibbs_state(const QbmModel& model, const ParamVector& a);
DensityMatrix boltzmann_state(const QbmModel& model, const ParamVector& a);
/// Reduced state of the visible subsystem.
DensityMatrix visible_state(const QbmModel& model, const ParamVector& a);

struct TargetState {
  double r = 0.0;
  double phi = 0.0;  // radians, reduced to [0, 2pi)
  PureState state;

  DensityMatrix density() const { return state.projector(); }
};

/// sqrt(1-r^2) (|01>+|10>)/sqrt2 + r cos(phi) |00> + r sin(phi) |11>.
TargetState target_state(double r, double phi);

/// Component i is Tr(rho O_i).
std::vector<double> moments(const DensityMatrix& rho, const OperatorBasis& basis);

/// op (x) I_dim_h, lifting a visible operator onto the full space.
HermitianOperator embed_visible(const HermitianOperator& op, Eigen::Index dim_h);

}  // namespace qbm
