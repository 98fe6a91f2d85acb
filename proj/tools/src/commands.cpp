#include "qbm_cli/commands.hpp"
#include "qbm_cli/output.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace qbm::cli {

using nlohmann::ordered_json;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Uniform doubles from raw 53-bit draws; identical across standard libraries.
class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : rng_(seed) {}
  double next(double lo, double hi) { return lo + (hi - lo) * (static_cast<double>(rng_() >> 11) * 0x1.0p-53); }

 private:
  std::mt19937_64 rng_;
};

void emit(const RunConfig& cfg, const CsvTable& csv, const ordered_json& j, std::ostream& out) {
  write_text(cfg.out, cfg.format == Format::csv ? csv.str() : dump_json(j), out);
}

// NaN has no JSON spelling; singular cells carry null.
ordered_json json_real(double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); }

SweepGrid grid_or(const RunConfig& cfg, const SweepGrid& fallback) {
  SweepGrid g = fallback;
  if (cfg.grid_r) g.r_values = *cfg.grid_r;
  if (cfg.grid_phi) g.phi_values = *cfg.grid_phi;
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

// 20 x 20 cells whose offsets keep clear of the singular loci.
SweepGrid regular_grid() {
  SweepGrid g;
  for (int i = 0; i < 20; ++i) g.r_values.push_back((i + 0.5) / 20.0);
  for (int j = 0; j < 20; ++j) g.phi_values.push_back((j + 0.37) * kPi / 10.0);
  return g;
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  const std::string ext = p.extension().string();
  return (p.parent_path() / (stem + suffix + ext)).string();
}

}  // namespace

int cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  if (!cfg.r || !cfg.phi) throw ConfigError("train needs --r and --phi");
  const auto model = make_model(cfg.model.value_or("visible2q"));
  const auto target = target_state(*cfg.r, *cfg.phi);
  const auto result = multi_start(model, target.density(), cfg.bfgs, cfg.ms);
  const auto& best = result.best;
  const auto& labels = model.basis().labels();

  std::vector<std::string> header{"model", "r",        "phi",     "s_min_bits", "iterations", "converged",
                                  "grad_norm", "boundary", "status", "starts",     "best_start"};
  for (const auto& l : labels) header.push_back("a_" + l);
  CsvTable csv(header);
  ordered_json j;
  const std::string name = cfg.model.value_or("visible2q");
  csv.cell(name).cell(*cfg.r).cell(target.phi).cell(best.s_min).cell(static_cast<long long>(best.iterations));
  csv.cell(best.converged).cell(best.grad_norm).cell(best.boundary).cell(best.status);
  csv.cell(static_cast<long long>(cfg.ms.n_starts)).cell(static_cast<long long>(result.best_index));
  j["model"] = name;
  j["r"] = *cfg.r;
  j["phi"] = target.phi;
  j["s_min_bits"] = best.s_min;
  j["iterations"] = best.iterations;
  j["converged"] = best.converged;
  j["grad_norm"] = best.grad_norm;
  j["boundary"] = best.boundary;
  j["status"] = best.status;
  j["starts"] = cfg.ms.n_starts;
  j["best_start"] = result.best_index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    csv.cell(best.a_opt[i]);
    j["a_" + labels[i]] = best.a_opt[i];
  }
  csv.end_row();
  emit(cfg, csv, j, out);
  if (!best.converged) {
    diag << "qbm train: best run did not converge (" << best.status << ")\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  const auto model = make_model(cfg.model.value_or("visible2q"));
  const auto grid = grid_or(cfg, SweepGrid::standard());
  const auto table = sweep(model, grid, cfg.bfgs, cfg.ms);

  CsvTable csv({"r", "phi", "s_min_bits", "converged", "grad_norm"});
  ordered_json rows = ordered_json::array();
  std::size_t failed = 0;
  for (const auto& c : table.cells) {
    csv.cell(c.r).cell(c.phi).cell(c.s_min).cell(c.converged).cell(c.grad_norm);
    csv.end_row();
    rows.push_back({{"r", c.r}, {"phi", c.phi}, {"s_min_bits", c.s_min}, {"converged", c.converged},
                    {"grad_norm", c.grad_norm}});
    if (!c.converged) ++failed;
  }
  ordered_json j;
  j["model"] = cfg.model.value_or("visible2q");
  j["rows"] = std::move(rows);
  emit(cfg, csv, j, out);
  if (failed > 0) {
    diag << "qbm sweep: " << failed << " of " << table.cells.size() << " cells did not converge\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_baseline(const RunConfig& cfg, std::ostream& out, std::ostream& /*diag*/) {
  const bool rim = cfg.mode == "r1";
  std::vector<double> xs;
  if (rim) {
    xs = cfg.grid_phi.value_or(std::vector<double>{});
    if (xs.empty()) {
      for (int j = 0; j <= 120; ++j) xs.push_back(j * kPi / 60.0);
    }
  } else {
    xs = cfg.grid_r.value_or(std::vector<double>{});
    if (xs.empty()) {
      for (int i = 0; i <= 20; ++i) xs.push_back(i / 20.0);
    }
  }
  CsvTable csv({"x", "analytic_bits"});
  ordered_json rows = ordered_json::array();
  for (double x : xs) {
    const double s = rim ? baseline_r1(x) : baseline_phi_3pi4(x);
    csv.cell(x).cell(s);
    csv.end_row();
    rows.push_back({{"x", x}, {"analytic_bits", s}});
  }
  ordered_json j;
  j["mode"] = cfg.mode;
  j["rows"] = std::move(rows);
  emit(cfg, csv, j, out);
  return kOk;
}

int cmd_geometry(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  const auto grid = grid_or(cfg, regular_grid());
  CsvTable csv({"r", "phi", "a_star", "b_star", "det_hessian", "boundary", "fidelity", "gap", "singular"});
  ordered_json rows = ordered_json::array();
  std::size_t disagreements = 0;
  for (double r : grid.r_values) {
    for (double phi : grid.phi_values) {
      double a = kNaN, b = kNaN, det = kNaN, fidelity = kNaN, gap = kNaN;
      bool boundary = false, singular = false;
      try {
        const auto ext = extreme_params(r, phi);
        a = ext.a_star;
        b = ext.b_star;
        const auto cert = ground_state_certificate(r, phi);
        boundary = cert.boundary;
        fidelity = cert.fidelity;
        gap = cert.gap;
        det = hessian_det(r, phi);
      } catch (const SingularityError&) {
        singular = true;
      }
      if (!singular && boundary != (det > 0.0)) ++disagreements;
      csv.cell(r).cell(phi).cell(a).cell(b).cell(det).cell(boundary).cell(fidelity).cell(gap).cell(singular);
      csv.end_row();
      rows.push_back({{"r", r},
                      {"phi", phi},
                      {"a_star", json_real(a)},
                      {"b_star", json_real(b)},
                      {"det_hessian", json_real(det)},
                      {"boundary", boundary},
                      {"fidelity", json_real(fidelity)},
                      {"gap", json_real(gap)},
                      {"singular", singular}});
    }
  }
  ordered_json j;
  j["rows"] = std::move(rows);
  emit(cfg, csv, j, out);

  std::string cloud_path = cfg.cloud_out;
  if (cloud_path.empty() && !cfg.out.empty()) cloud_path = sibling_path(cfg.out, "_cloud");
  if (!cloud_path.empty()) {
    const auto cloud = numerical_range_cloud(cfg.samples, cfg.ms.seed);
    CsvTable c({"z1_plus_z2", "x1_plus_x2", "z1z2"});
    ordered_json points = ordered_json::array();
    for (const auto& t : cloud) {
      c.cell(t[0]).cell(t[1]).cell(t[2]);
      c.end_row();
      points.push_back({t[0], t[1], t[2]});
    }
    ordered_json cj;
    cj["seed"] = cfg.ms.seed;
    cj["points"] = std::move(points);
    write_text(cloud_path, cfg.format == Format::csv ? c.str() : dump_json(cj), out);
  }

  if (disagreements > 0) {
    diag << "qbm geometry: boundary and Hessian sign disagree at " << disagreements << " cells\n";
    return kPropertyViolation;
  }
  return kOk;
}

int cmd_symcheck(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  const std::string name = cfg.model.value_or("hidden3q");
  const auto model = make_model(name);
  std::vector<SymmetryOp> ops;
  for (const auto& op : all_symmetry_ops()) {
    if (model.has_hidden() || op.hidden_part == Pauli::I) ops.push_back(op);
  }

  struct Trial {
    double r, phi;
    ParamVector a;
    std::vector<InvarianceCheck> checks;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
  UniformStream u(cfg.ms.seed);
  for (auto& t : trials) {
    t.r = u.next(0.0, 1.0);
    t.phi = u.next(0.0, 2.0 * kPi);
    RealVector v(static_cast<Eigen::Index>(model.n_params()));
    for (auto& x : v) x = u.next(-2.0, 2.0);
    t.a = ParamVector(std::move(v));
  }
  for_each_index(trials.size(), cfg.ms.execution, cfg.ms.threads, [&](std::size_t k) {
    auto& t = trials[k];
    for (const auto& op : ops) t.checks.push_back(symmetry_invariance_check(t.r, t.phi, t.a, op, model));
  });

  CsvTable csv({"op", "r", "phi", "lhs_bits", "rhs_bits", "abs_diff"});
  ordered_json rows = ordered_json::array();
  double worst = 0.0;
  for (const auto& t : trials) {
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const auto& c = t.checks[i];
      const double diff = std::abs(c.lhs - c.rhs);
      worst = std::max(worst, diff);
      csv.cell(ops[i].name()).cell(t.r).cell(t.phi).cell(c.lhs).cell(c.rhs).cell(diff);
      csv.end_row();
      rows.push_back({{"op", ops[i].name()},
                      {"r", t.r},
                      {"phi", t.phi},
                      {"lhs_bits", c.lhs},
                      {"rhs_bits", c.rhs},
                      {"abs_diff", diff}});
    }
  }
  ordered_json j;
  j["model"] = name;
  j["rows"] = std::move(rows);
  emit(cfg, csv, j, out);
  if (!(worst < 1e-9)) {
    diag << "qbm symcheck: max abs_diff " << format_real(worst) << " exceeds 1e-9\n";
    return kPropertyViolation;
  }
  return kOk;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
  const std::string name = cfg.model.value_or("visible2q");
  const auto model = make_model(name);
  struct Trial {
    double r, phi;
    ParamVector a;
    double max_rel = 0.0;
    double max_abs_small = 0.0;
  };
  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
  UniformStream u(cfg.ms.seed);
  for (auto& t : trials) {
    t.r = u.next(0.0, 1.0);
    t.phi = u.next(0.0, 2.0 * kPi);
    RealVector v(static_cast<Eigen::Index>(model.n_params()));
    for (auto& x : v) x = u.next(-1.0, 1.0);
    t.a = ParamVector(std::move(v));
  }
  // Components below this magnitude are compared absolutely.
  constexpr double kSmall = 1e-8;
  for_each_index(trials.size(), cfg.ms.execution, cfg.ms.threads, [&](std::size_t k) {
    auto& t = trials[k];
    const auto target = target_state(t.r, t.phi).density();
    const RealVector g = model.has_hidden() ? grad_hidden(model, target, t.a) : grad_visible(model, target, t.a);
    const RealVector fd = finite_diff_grad(model, target, t.a, cfg.step);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      const double diff = std::abs(g(i) - fd(i));
      if (std::abs(fd(i)) < kSmall) {
        t.max_abs_small = std::max(t.max_abs_small, diff);
      } else {
        t.max_rel = std::max(t.max_rel, diff / std::abs(fd(i)));
      }
    }
  });

  CsvTable csv({"trial", "r", "phi", "max_rel_err", "max_abs_err_small"});
  ordered_json rows = ordered_json::array();
  bool ok = true;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    const auto& t = trials[k];
    ok = ok && t.max_rel < 1e-5 && t.max_abs_small < kSmall;
    csv.cell(static_cast<long long>(k)).cell(t.r).cell(t.phi).cell(t.max_rel).cell(t.max_abs_small);
    csv.end_row();
    rows.push_back({{"trial", k},
                    {"r", t.r},
                    {"phi", t.phi},
                    {"max_rel_err", t.max_rel},
                    {"max_abs_err_small", t.max_abs_small}});
  }
  ordered_json j;
  j["model"] = name;
  j["step"] = cfg.step;
  j["rows"] = std::move(rows);
  emit(cfg, csv, j, out);
  if (!ok) {
    diag << "qbm gradcheck: relative error at or above 1e-5\n";
    return kPropertyViolation;
  }
  return kOk;
}

}  // namespace qbm::cli
