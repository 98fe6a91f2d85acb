#include "qbm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qbm {

void SweepGrid::validate() const {
  if (r_values.empty() || phi_values.empty()) throw std::invalid_argument("SweepGrid: empty axis");
  if (!std::is_sorted(r_values.begin(), r_values.end()) || !std::is_sorted(phi_values.begin(), phi_values.end())) {
    throw std::invalid_argument("SweepGrid: axes must be ascending");
  }
  if (r_values.front() < 0.0 || r_values.back() > 1.0) throw std::invalid_argument("SweepGrid: r outside [0, 1]");
  if (phi_values.front() < 0.0 || phi_values.back() > 2.0 * std::numbers::pi + 1e-12) {
    throw std::invalid_argument("SweepGrid: phi outside [0, 2pi]");
  }
}

SweepGrid SweepGrid::standard() {
  SweepGrid g;
  for (int i = 0; i <= 20; ++i) g.r_values.push_back(i / 20.0);
  for (int j = 0; j <= 120; ++j) g.phi_values.push_back(j * std::numbers::pi / 60.0);
  return g;
}

SweepTable sweep(const QbmModel& model, const SweepGrid& grid, const BfgsOptions& bfgs, const MultiStartOptions& ms) {
  grid.validate();
  bfgs.validate();
  ms.validate();
  SweepTable table;
  table.grid = grid;
  table.cells.resize(grid.size());
  const std::size_t n_phi = grid.phi_values.size();

  MultiStartOptions inner = ms;
  inner.execution = Execution::serial;
  for_each_index(table.cells.size(), ms.execution, ms.threads, [&](std::size_t idx) {
    const double r = grid.r_values[idx / n_phi];
    const double phi = grid.phi_values[idx % n_phi];
    const auto target = target_state(r, phi).density();
    const auto best = multi_start(model, target, bfgs, inner).best;
    table.cells[idx] = SweepCell{r, phi, best.s_min, best.converged, best.grad_norm, best.a_opt};
  });
  return table;
}

namespace {

double wrap_angle(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w < 0.0) w += two_pi;
  return w;
}

// Index of a grid angle equal to phi modulo 2pi, or npos.
std::size_t find_angle(const std::vector<double>& phis, double phi, double tol) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double target = wrap_angle(phi);
  for (std::size_t j = 0; j < phis.size(); ++j) {
    const double diff = std::abs(wrap_angle(phis[j]) - target);
    if (diff < tol || std::abs(diff - two_pi) < tol) return j;
  }
  return static_cast<std::size_t>(-1);
}

}  // namespace

MirrorResiduals mirror_residuals(const SweepTable& table, double angle_tol) {
  MirrorResiduals out;
  const auto& phis = table.grid.phi_values;
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t i = 0; i < table.grid.r_values.size(); ++i) {
    for (std::size_t j = 0; j < phis.size(); ++j) {
      const double s = table.at(i, j).s_min;
      const std::size_t jd = find_angle(phis, half_pi - phis[j], angle_tol);
      if (jd != static_cast<std::size_t>(-1)) {
        out.diagonal = std::max(out.diagonal, std::abs(s - table.at(i, jd).s_min));
        ++out.pairs;
      }
      const std::size_t ja = find_angle(phis, 3.0 * half_pi - phis[j], angle_tol);
      if (ja != static_cast<std::size_t>(-1)) {
        out.anti_diagonal = std::max(out.anti_diagonal, std::abs(s - table.at(i, ja).s_min));
        ++out.pairs;
      }
    }
  }
  return out;
}

}  // namespace qbm
