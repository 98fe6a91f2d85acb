#pragma once

// Landscape sweeps, closed-form baselines, ground-state geometry of the
// two-qubit family and the symmetry operations of the hidden-layer model.

#include "qbm/bfgs.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbm {

class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// ---------------------------------------------------------------------------
// Sweeps

struct SweepGrid {
  std::vector<double> r_values;    // ascending, within [0, 1]
  std::vector<double> phi_values;  // ascending radians, within [0, 2pi]

  /// Throws std::invalid_argument on empty, unsorted or out-of-range axes.
  void validate() const;
  std::size_t size() const { return r_values.size() * phi_values.size(); }

  /// r = 0, 0.05, ..., 1 and phi = 0, pi/60, ..., 2pi (21 x 121 cells).
  static SweepGrid standard();
};

struct SweepCell {
  double r = 0.0;
  double phi = 0.0;
  double s_min = 0.0;  // bits
  bool converged = false;
  double grad_norm = 0.0;
  ParamVector a_opt;
};

struct SweepTable {
  SweepGrid grid;
  std::vector<SweepCell> cells;  // r-major: index = i_r * n_phi + i_phi

  const SweepCell& at(std::size_t i_r, std::size_t i_phi) const {
    return cells.at(i_r * grid.phi_values.size() + i_phi);
  }
};

/// Best multi-start s_min for every grid cell. Cells run in parallel when
/// `ms.execution` is parallel; each cell's multi-start then runs serially.
SweepTable sweep(const QbmModel& model, const SweepGrid& grid, const BfgsOptions& bfgs, const MultiStartOptions& ms);

struct MirrorResiduals {
  double diagonal = 0.0;       // max |S(r,phi) - S(r, pi/2 - phi)|
  double anti_diagonal = 0.0;  // max |S(r,phi) - S(r, 3pi/2 - phi)|
  std::size_t pairs = 0;
};

/// Compares every cell with its mirror images that are also grid cells.
MirrorResiduals mirror_residuals(const SweepTable& table, double angle_tol = 1e-9);

// ---------------------------------------------------------------------------
// Closed-form baselines (bits)

/// Minimal relative entropy on the r = 1 rim.
double baseline_r1(double phi);
/// Minimal relative entropy along phi = 3pi/4.
double baseline_phi_3pi4(double r);

// ---------------------------------------------------------------------------
// Ground-state geometry of H' = a (Z1+Z2) + b (X1+X2) + Z1 Z2

struct ExtremePoint {
  double a_star = 0.0;
  double b_star = 0.0;
};

/// <psi(r,phi)| H'(a,b) |psi(r,phi)>.
double mean_energy(double a, double b, double r, double phi);

/// (a, b) at which (r, phi) is a stationary point of mean_energy.
/// Throws SingularityError when 1 - 2 r^2 sin^2(phi + pi/4) vanishes or
/// sin(phi + pi/4) = 0.
ExtremePoint extreme_params(double r, double phi);

/// Determinant of the (r, phi) Hessian of mean_energy at extreme_params.
/// Throws SingularityError where its closed form is undefined.
double hessian_det(double r, double phi);

struct Certificate {
  bool boundary = false;
  double fidelity = 0.0;  // with the best extremal eigenvector
  double gap = 0.0;       // to the neighbouring level at that end
};

HermitianOperator probe_hamiltonian(double a, double b);

/// Whether |psi(r,phi)> is the unique lowest or highest eigenvector of
/// H'(a_*, b_*). Propagates SingularityError.
Certificate ground_state_certificate(double r, double phi);

using Triple = std::array<double, 3>;

/// (<Z1+Z2>, <X1+X2>, <Z1 Z2>) of psi(r, phi).
Triple surface_point(double r, double phi);

/// Expectation triples of the three probe observables.
Triple expectation_triple(const ComplexVector& state);
std::array<HermitianOperator, 3> probe_observables();

/// Triples of n random pure two-qubit states (normalized complex Gaussian
/// amplitudes). Deterministic in the seed.
std::vector<Triple> numerical_range_cloud(std::size_t n, std::uint64_t seed);

/// max over states of u . triple, the largest eigenvalue of u . observables.
double support_function(const Triple& u);

/// Quasi-uniform unit directions on the sphere (Fibonacci lattice).
std::vector<Triple> sphere_directions(std::size_t n);

/// Support-function membership test: u.p <= h(u) + slack for every u,
/// where h is the exact support of the numerical range.
bool in_numerical_range(const Triple& p, const std::vector<Triple>& directions, double slack);

/// Same test against the convex hull of a finite cloud.
bool in_cloud_hull(const Triple& p, const std::vector<Triple>& cloud, const std::vector<Triple>& directions,
                   double slack);

// ---------------------------------------------------------------------------
// Symmetry operations {I, XX, YY, ZZ} (x) {I, X, Y, Z}

enum class Pauli : std::uint8_t { I, X, Y, Z };

struct SymmetryOp {
  Pauli visible_part = Pauli::I;  // acts as P (x) P on the two visible qubits
  Pauli hidden_part = Pauli::I;

  std::string name() const;
  bool operator==(const SymmetryOp&) const = default;
};

/// All 16 operations, visible-major.
std::vector<SymmetryOp> all_symmetry_ops();

/// The unitary on the model's full space. Throws std::invalid_argument on a
/// hidden part for a model without a hidden qubit.
ComplexMatrix symmetry_unitary(const SymmetryOp& op, const QbmModel& model);

/// The a' with U H(a) U^dagger = H(a'). Throws std::invalid_argument when
/// the op does not map the basis onto itself up to signs.
ParamVector symmetry_map(const SymmetryOp& op, const ParamVector& a, const QbmModel& model);

/// Angle of the target family member that U maps psi(r, phi) onto.
double transformed_phi(const SymmetryOp& op, double phi);

struct InvarianceCheck {
  double lhs = 0.0;  // S(psi(r, phi') | sigma(a')) in bits
  double rhs = 0.0;  // S(psi(r, phi)  | sigma(a))  in bits
};

InvarianceCheck symmetry_invariance_check(double r, double phi, const ParamVector& a, const SymmetryOp& op,
                                          const QbmModel& model);

}  // namespace qbm
