#include "qbm/analysis.hpp"

#include <cmath>
#include <numbers>

namespace qbm {

namespace {

ComplexMatrix single_site(Pauli p) {
  switch (p) {
    case Pauli::I: return pauli::identity();
    case Pauli::X: return pauli::x();
    case Pauli::Y: return pauli::y();
    case Pauli::Z: return pauli::z();
  }
  return pauli::identity();
}

char letter(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

}  // namespace

std::string SymmetryOp::name() const {
  std::string v = visible_part == Pauli::I ? "I1I2" : std::string{letter(visible_part)} + "1" + letter(visible_part) + "2";
  return v + "*" + letter(hidden_part) + "3";
}

std::vector<SymmetryOp> all_symmetry_ops() {
  std::vector<SymmetryOp> ops;
  for (Pauli v : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) {
    for (Pauli h : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) ops.push_back({v, h});
  }
  return ops;
}

ComplexMatrix symmetry_unitary(const SymmetryOp& op, const QbmModel& model) {
  if (model.dim_v() != 4) throw std::invalid_argument("symmetry_unitary: model needs two visible qubits");
  const ComplexMatrix site = single_site(op.visible_part);
  ComplexMatrix u = kron(site, site);
  if (model.has_hidden()) {
    if (model.dim_h() != 2) throw std::invalid_argument("symmetry_unitary: hidden subsystem must be one qubit");
    u = kron(u, single_site(op.hidden_part));
  } else if (op.hidden_part != Pauli::I) {
    throw std::invalid_argument("symmetry_unitary: hidden part on a model without hidden qubit");
  }
  return u;
}

ParamVector symmetry_map(const SymmetryOp& op, const ParamVector& a, const QbmModel& model) {
  if (a.size() != model.n_params()) throw std::invalid_argument("symmetry_map: parameter length mismatch");
  const ComplexMatrix u = symmetry_unitary(op, model);
  RealVector out(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const ComplexMatrix& o = model.basis().op(i).matrix();
    const ComplexMatrix conj = u * o * u.adjoint();
    double sign = 0.0;
    if ((conj - o).cwiseAbs().maxCoeff() < 1e-12) {
      sign = 1.0;
    } else if ((conj + o).cwiseAbs().maxCoeff() < 1e-12) {
      sign = -1.0;
    } else {
      throw std::invalid_argument("symmetry_map: operation does not preserve basis operator " +
                                  model.basis().labels()[i]);
    }
    out(static_cast<Eigen::Index>(i)) = sign * a[i];
  }
  return ParamVector(std::move(out));
}

double transformed_phi(const SymmetryOp& op, double phi) {
  constexpr double pi = std::numbers::pi;
  double out = phi;
  switch (op.visible_part) {
    case Pauli::I: out = phi; break;
    case Pauli::X: out = 0.5 * pi - phi; break;
    case Pauli::Y: out = 1.5 * pi - phi; break;
    case Pauli::Z: out = phi + pi; break;
  }
  out = std::fmod(out, 2.0 * pi);
  if (out < 0.0) out += 2.0 * pi;
  return out;
}

InvarianceCheck symmetry_invariance_check(double r, double phi, const ParamVector& a, const SymmetryOp& op,
                                          const QbmModel& model) {
  const ParamVector mapped = symmetry_map(op, a, model);
  const auto original = target_state(r, phi).density();
  const auto image = target_state(r, transformed_phi(op, phi)).density();
  return {objective(model, image, mapped), objective(model, original, a)};
}

}  // namespace qbm
