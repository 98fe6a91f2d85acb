#pragma once

// Relative-entropy objective for a QBM and its analytic gradient.
//
// Everything here works in natural-log units; only `objective` reports bits.

#include "qbm/model.hpp"

namespace qbm {

/// Spectral data at one parameter point, shared by the hidden-layer
/// objective and gradient.
struct GradientWorkspace {
  EigenDecomposition eig_e;  // of a.O
  double shift = 0.0;        // subtracted from the exponent before exp()
  RealVector e;              // exp(lambda_l - shift)
  ComplexMatrix rho;         // normalized full state
  ComplexMatrix d;           // Tr_h of the shifted exponential
  EigenDecomposition eig_d;  // values floored to a positive noise level
  Eigen::MatrixXd loewner_e;  // (e_l - e_m) / (ln e_l - ln e_m), diag e_l
  Eigen::MatrixXd loewner_d;  // (ln d_y - ln d_x) / (d_y - d_x), diag 1/d_x

  /// `extra_shift` adds to the max-eigenvalue shift; results are invariant
  /// to it up to rounding.
  static GradientWorkspace build(const QbmModel& model, const ParamVector& a, double extra_shift = 0.0);
};

/// Relative degeneracy threshold for the divided-difference branches.
inline constexpr double kDegeneracyTol = 1e-10;
/// Eigenvalues of Tr_h e^{a.O} below this fraction of the largest are
/// indistinguishable from rounding and are floored there.
inline constexpr double kReducedSpectrumFloor = 1e-15;

/// S(target | sigma(a)) in bits.
double objective(const QbmModel& model, const DensityMatrix& target, const ParamVector& a);
double objective_nats(const QbmModel& model, const DensityMatrix& target, const ParamVector& a);

/// Visible-only gradient Tr(rho(a) O_i) - Tr(target O_i).
/// Throws std::logic_error on a model with a hidden subsystem.
RealVector grad_visible(const QbmModel& model, const DensityMatrix& target, const ParamVector& a);

/// Hidden-layer gradient from the eigenbasis divided-difference form.
RealVector grad_hidden(const QbmModel& model, const DensityMatrix& target, const ParamVector& a,
                       const GradientWorkspace& ws);
RealVector grad_hidden(const QbmModel& model, const DensityMatrix& target, const ParamVector& a);

/// Central differences of objective_nats.
RealVector finite_diff_grad(const QbmModel& model, const DensityMatrix& target, const ParamVector& a,
                            double step);

/// Objective and gradient bound to a fixed (model, target) pair.
///
/// Caches the target entropy; dispatches to the visible or hidden route.
class RelativeEntropyObjective {
 public:
  RelativeEntropyObjective(const QbmModel& model, DensityMatrix target);

  struct Evaluation {
    double value = 0.0;  // nats
    RealVector grad;
    bool finite = true;
  };

  double value(const RealVector& a) const;
  Evaluation evaluate(const RealVector& a) const;

  const QbmModel& model() const { return model_; }
  const DensityMatrix& target() const { return target_; }
  double target_entropy_nats() const { return target_entropy_; }

 private:
  double visible_value(const RealVector& a, RealVector* grad) const;
  double hidden_value(const RealVector& a, RealVector* grad) const;

  QbmModel model_;
  DensityMatrix target_;
  double target_entropy_ = 0.0;
  std::vector<double> target_moments_;
};

}  // namespace qbm
