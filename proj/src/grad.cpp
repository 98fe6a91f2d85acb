#include "qbm/grad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbm {

namespace {

bool nearly_equal(double x, double y) {
  return std::abs(x - y) < kDegeneracyTol * std::max({1.0, std::abs(x), std::abs(y)});
}

// (e^x - e^y) / (x - y) for shifted exponents x, y <= 0.
double exp_divided_difference(double x, double y) {
  if (nearly_equal(x, y)) return std::exp(0.5 * (x + y));
  if (x < y) std::swap(x, y);
  if (x - y > 1.0) return (std::exp(x) - std::exp(y)) / (x - y);
  return std::exp(y) * std::expm1(x - y) / (x - y);
}

// (ln u - ln v) / (u - v) given ln u, ln v.
double log_divided_difference(double lu, double lv) {
  if (nearly_equal(lu, lv)) return std::exp(-0.5 * (lu + lv));
  if (lu < lv) std::swap(lu, lv);
  // u - v = v (e^{lu-lv} - 1)
  if (lu - lv > 1.0) return (lu - lv) / (std::exp(lu) - std::exp(lv));
  return (lu - lv) / (std::exp(lv) * std::expm1(lu - lv));
}

void require_target(const QbmModel& model, const DensityMatrix& target) {
  if (target.dim() != model.dim_v()) {
    throw std::invalid_argument("target dimension does not match the visible subsystem");
  }
}

}  // namespace

GradientWorkspace GradientWorkspace::build(const QbmModel& model, const ParamVector& a, double extra_shift) {
  GradientWorkspace ws;
  ws.eig_e = herm_eig(generator(model, a));
  ws.shift = ws.eig_e.values.maxCoeff() + extra_shift;
  const RealVector x = ws.eig_e.values.array() - ws.shift;
  ws.e = x.array().exp();

  const ComplexMatrix& v = ws.eig_e.vectors;
  const ComplexMatrix shifted_exp = v * ws.e.asDiagonal() * v.adjoint();
  ws.rho = shifted_exp / ws.e.sum();
  ws.d = partial_trace_last(shifted_exp, model.dim_v(), model.dim_h());
  ws.d = 0.5 * (ws.d + ws.d.adjoint()).eval();
  ws.eig_d = herm_eig(ws.d);
  const double floor = ws.eig_d.values.maxCoeff() * kReducedSpectrumFloor;
  ws.eig_d.values = ws.eig_d.values.cwiseMax(floor);

  const Eigen::Index n = x.size();
  ws.loewner_e.resize(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    for (Eigen::Index m = l; m < n; ++m) {
      const double c = l == m ? ws.e(l) : exp_divided_difference(x(l), x(m));
      ws.loewner_e(l, m) = c;
      ws.loewner_e(m, l) = c;
    }
  }
  const RealVector log_d = ws.eig_d.values.array().log();
  const Eigen::Index nv = log_d.size();
  ws.loewner_d.resize(nv, nv);
  for (Eigen::Index p = 0; p < nv; ++p) {
    for (Eigen::Index q = p; q < nv; ++q) {
      const double c = p == q ? 1.0 / ws.eig_d.values(p) : log_divided_difference(log_d(p), log_d(q));
      ws.loewner_d(p, q) = c;
      ws.loewner_d(q, p) = c;
    }
  }
  return ws;
}

RelativeEntropyObjective::RelativeEntropyObjective(const QbmModel& model, DensityMatrix target)
    : model_(model), target_(std::move(target)) {
  require_target(model_, target_);
  target_entropy_ = entropy_nats_of_spectrum(herm_eig(target_.matrix()).values);
  if (!model_.has_hidden()) target_moments_ = moments(target_, model_.basis());
}

double RelativeEntropyObjective::visible_value(const RealVector& a, RealVector* grad) const {
  const ParamVector params(a);
  const auto eig = herm_eig(generator(model_, params));
  const double shift = eig.values.maxCoeff();
  const RealVector w = (eig.values.array() - shift).exp();
  const double z = w.sum();
  const double log_partition = shift + std::log(z);

  // ln rho = a.O - ln Z, so Tr(target ln rho) = a . <O>_target - ln Z.
  double linear = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) linear += a(i) * target_moments_[static_cast<std::size_t>(i)];
  const double value = -target_entropy_ - linear + log_partition;

  if (grad != nullptr) {
    const ComplexMatrix rho = eig.vectors * (w / z).asDiagonal() * eig.vectors.adjoint();
    grad->resize(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      (*grad)(i) = trace_product(rho, model_.basis().op(idx).matrix()) - target_moments_[idx];
    }
  }
  return value;
}

namespace {

double hidden_value_from(const GradientWorkspace& ws, const DensityMatrix& target, double target_entropy,
                         ComplexMatrix* rotated_target) {
  const ComplexMatrix& u = ws.eig_d.vectors;
  ComplexMatrix t = u.adjoint() * target.matrix() * u;
  double cross = 0.0;  // Tr(target ln D)
  for (Eigen::Index x = 0; x < t.rows(); ++x) cross += t(x, x).real() * std::log(ws.eig_d.values(x));
  const double log_trace = std::log(ws.e.sum());
  if (rotated_target != nullptr) *rotated_target = std::move(t);
  return -target_entropy - cross + log_trace;
}

RealVector hidden_gradient_from(const QbmModel& model, const GradientWorkspace& ws,
                                const ComplexMatrix& rotated_target) {
  const ComplexMatrix& v = ws.eig_e.vectors;
  const ComplexMatrix& u = ws.eig_d.vectors;
  // sum_xy L_xy <y|target|x> <x|B|y> = sum_xy L_xy T^T_xy B_xy in the D eigenbasis.
  const ComplexMatrix weights = ws.loewner_d.cast<Complex>().cwiseProduct(rotated_target.transpose());
  RealVector g(static_cast<Eigen::Index>(model.n_params()));
  for (std::size_t i = 0; i < model.n_params(); ++i) {
    const ComplexMatrix& op = model.basis().op(i).matrix();
    const ComplexMatrix op_e = v.adjoint() * op * v;
    const ComplexMatrix b_full = v * ws.loewner_e.cast<Complex>().cwiseProduct(op_e) * v.adjoint();
    const ComplexMatrix b = partial_trace_last(b_full, model.dim_v(), model.dim_h());
    const ComplexMatrix b_rot = u.adjoint() * b * u;
    const double log_term = weights.cwiseProduct(b_rot).sum().real();
    g(static_cast<Eigen::Index>(i)) = trace_product(ws.rho, op) - log_term;
  }
  return g;
}

}  // namespace

double RelativeEntropyObjective::hidden_value(const RealVector& a, RealVector* grad) const {
  const ParamVector params(a);
  const auto ws = GradientWorkspace::build(model_, params);
  ComplexMatrix rotated;
  const double value = hidden_value_from(ws, target_, target_entropy_, grad ? &rotated : nullptr);
  if (grad != nullptr) *grad = hidden_gradient_from(model_, ws, rotated);
  return value;
}

double RelativeEntropyObjective::value(const RealVector& a) const {
  return model_.has_hidden() ? hidden_value(a, nullptr) : visible_value(a, nullptr);
}

RelativeEntropyObjective::Evaluation RelativeEntropyObjective::evaluate(const RealVector& a) const {
  Evaluation ev;
  ev.value = model_.has_hidden() ? hidden_value(a, &ev.grad) : visible_value(a, &ev.grad);
  ev.finite = std::isfinite(ev.value) && ev.grad.allFinite();
  return ev;
}

double objective_nats(const QbmModel& model, const DensityMatrix& target, const ParamVector& a) {
  if (a.size() != model.n_params()) throw std::invalid_argument("objective: parameter length mismatch");
  return RelativeEntropyObjective(model, target).value(a.values());
}

double objective(const QbmModel& model, const DensityMatrix& target, const ParamVector& a) {
  return nats_to_bits(objective_nats(model, target, a));
}

RealVector grad_visible(const QbmModel& model, const DensityMatrix& target, const ParamVector& a) {
  if (model.has_hidden()) throw std::logic_error("grad_visible: model has a hidden subsystem");
  if (a.size() != model.n_params()) throw std::invalid_argument("grad_visible: parameter length mismatch");
  return RelativeEntropyObjective(model, target).evaluate(a.values()).grad;
}

RealVector grad_hidden(const QbmModel& model, const DensityMatrix& target, const ParamVector& a,
                       const GradientWorkspace& ws) {
  if (!model.has_hidden()) throw std::logic_error("grad_hidden: model has no hidden subsystem");
  require_target(model, target);
  if (a.size() != model.n_params()) throw std::invalid_argument("grad_hidden: parameter length mismatch");
  ComplexMatrix rotated = ws.eig_d.vectors.adjoint() * target.matrix() * ws.eig_d.vectors;
  RealVector g = hidden_gradient_from(model, ws, rotated);
  if (!g.allFinite()) throw std::runtime_error("grad_hidden: non-finite gradient component");
  return g;
}

RealVector grad_hidden(const QbmModel& model, const DensityMatrix& target, const ParamVector& a) {
  return grad_hidden(model, target, a, GradientWorkspace::build(model, a));
}

RealVector finite_diff_grad(const QbmModel& model, const DensityMatrix& target, const ParamVector& a,
                            double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff_grad: step must be positive");
  const RelativeEntropyObjective f(model, target);
  RealVector g(a.values().size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    RealVector up = a.values();
    RealVector dn = a.values();
    up(i) += step;
    dn(i) -= step;
    g(i) = (f.value(up) - f.value(dn)) / (2.0 * step);
  }
  return g;
}

}  // namespace qbm
