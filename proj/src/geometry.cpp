#include "qbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <random>

namespace qbm {

namespace {

constexpr double kQuarterPi = 0.25 * std::numbers::pi;
constexpr double kSingularTol = 1e-9;

double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

double baseline_r1(double phi) {
  const double c2 = std::cos(phi) * std::cos(phi);
  const double s2 = std::sin(phi) * std::sin(phi);
  return 0.0 - xlog2x(c2) - xlog2x(s2);
}

double baseline_phi_3pi4(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("baseline_phi_3pi4: r must lie in [0, 1]");
  const double r2 = r * r;
  return -xlog2x(r2) - xlog2x(1.0 - r2) + 1.0;
}

double mean_energy(double a, double b, double r, double phi) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("mean_energy: r must lie in [0, 1]");
  const double r2 = r * r;
  return 2.0 * a * r2 * std::cos(2.0 * phi) + 4.0 * b * r * std::sqrt(1.0 - r2) * std::sin(phi + kQuarterPi) +
         2.0 * r2 - 1.0;
}

ExtremePoint extreme_params(double r, double phi) {
  const double s = std::sin(phi + kQuarterPi);
  const double denom = 1.0 - 2.0 * r * r * s * s;
  if (std::abs(denom) < kSingularTol || std::abs(s) < kSingularTol) {
    throw SingularityError("extreme_params: singular point");
  }
  const double one_minus = 1.0 - r * r;
  const double cot = std::cos(phi + kQuarterPi) / s;
  return {-one_minus * cot / denom, -r * std::sqrt(one_minus) * std::sin(2.0 * phi) / (s * denom)};
}

double hessian_det(double r, double phi) {
  const double s2 = std::sin(2.0 * phi);
  const double f1 = 1.0 + s2;
  const double f2 = 1.0 - r * r * f1;
  if (std::abs(f1) < kSingularTol || std::abs(f2) < kSingularTol) {
    throw SingularityError("hessian_det: singular point");
  }
  return 32.0 * r * r * s2 / (f1 * f2 * f2);
}

std::array<HermitianOperator, 3> probe_observables() {
  const ComplexMatrix z_sum = pauli_string("ZI", 2).matrix() + pauli_string("IZ", 2).matrix();
  const ComplexMatrix x_sum = pauli_string("XI", 2).matrix() + pauli_string("IX", 2).matrix();
  return {HermitianOperator::trusted(z_sum), HermitianOperator::trusted(x_sum), pauli_string("ZZ", 2)};
}

HermitianOperator probe_hamiltonian(double a, double b) {
  const auto obs = probe_observables();
  return HermitianOperator::trusted(a * obs[0].matrix() + b * obs[1].matrix() + obs[2].matrix());
}

Certificate ground_state_certificate(double r, double phi) {
  const auto ext = extreme_params(r, phi);
  const auto eig = herm_eig(probe_hamiltonian(ext.a_star, ext.b_star));
  const ComplexVector psi = target_state(r, phi).state.amplitudes();
  const Eigen::Index n = eig.values.size();

  const double f_low = std::norm(eig.vectors.col(0).dot(psi));
  const double f_high = std::norm(eig.vectors.col(n - 1).dot(psi));
  const double gap_low = eig.values(1) - eig.values(0);
  const double gap_high = eig.values(n - 1) - eig.values(n - 2);

  Certificate c;
  const bool low = f_low >= f_high;
  c.fidelity = std::min(1.0, low ? f_low : f_high);
  c.gap = low ? gap_low : gap_high;
  constexpr double kFidelityTol = 1e-8;
  constexpr double kGapTol = 1e-9;
  c.boundary = c.fidelity > 1.0 - kFidelityTol && c.gap > kGapTol;
  return c;
}

Triple expectation_triple(const ComplexVector& state) {
  const auto obs = probe_observables();
  Triple t{};
  for (std::size_t k = 0; k < 3; ++k) t[k] = state.dot(obs[k].matrix() * state).real();
  return t;
}

Triple surface_point(double r, double phi) {
  if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("surface_point: r must lie in [0, 1]");
  const double r2 = r * r;
  return {2.0 * r2 * std::cos(2.0 * phi), 4.0 * r * std::sqrt(1.0 - r2) * std::sin(phi + kQuarterPi), 2.0 * r2 - 1.0};
}

std::vector<Triple> numerical_range_cloud(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("numerical_range_cloud: n must be at least 1");
  std::mt19937_64 rng(seed);
  // Box-Muller on raw 53-bit uniforms keeps the stream library-independent.
  const auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
  const auto gaussian_pair = [&] {
    const double rad = std::sqrt(-2.0 * std::log(uniform()));
    const double ang = 2.0 * std::numbers::pi * uniform();
    return Complex(rad * std::cos(ang), rad * std::sin(ang));
  };
  const auto obs = probe_observables();
  std::vector<Triple> cloud;
  cloud.reserve(n);
  ComplexVector v(4);
  for (std::size_t s = 0; s < n; ++s) {
    for (Eigen::Index k = 0; k < 4; ++k) v(k) = gaussian_pair();
    v /= v.norm();
    Triple t{};
    for (std::size_t k = 0; k < 3; ++k) t[k] = v.dot(obs[k].matrix() * v).real();
    cloud.push_back(t);
  }
  return cloud;
}

double support_function(const Triple& u) {
  const auto obs = probe_observables();
  const ComplexMatrix m = u[0] * obs[0].matrix() + u[1] * obs[1].matrix() + u[2] * obs[2].matrix();
  return herm_eig(m).values.maxCoeff();
}

std::vector<Triple> sphere_directions(std::size_t n) {
  std::vector<Triple> dirs;
  dirs.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double ang = golden * static_cast<double>(k);
    dirs.push_back({rad * std::cos(ang), rad * std::sin(ang), z});
  }
  return dirs;
}

namespace {
double dot3(const Triple& a, const Triple& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
}  // namespace

bool in_numerical_range(const Triple& p, const std::vector<Triple>& directions, double slack) {
  return std::all_of(directions.begin(), directions.end(),
                     [&](const Triple& u) { return dot3(u, p) <= support_function(u) + slack; });
}

bool in_cloud_hull(const Triple& p, const std::vector<Triple>& cloud, const std::vector<Triple>& directions,
                   double slack) {
  for (const auto& u : directions) {
    double h = -std::numeric_limits<double>::infinity();
    for (const auto& c : cloud) h = std::max(h, dot3(u, c));
    if (dot3(u, p) > h + slack) return false;
  }
  return true;
}

}  // namespace qbm
