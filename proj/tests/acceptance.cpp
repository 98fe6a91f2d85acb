// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "qbm/analysis.hpp"
#include "qbm/bfgs.hpp"
#include "qbm/grad.hpp"
#include "qbm/model.hpp"
#include "qbm_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace qbm;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

template <class F>
void criterion(int id, const char* title, F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double train_visible(double r, double phi) {
  const auto model = visible_model_2q();
  return minimize(model, target_state(r, phi).density(), ParamVector::zeros(model.n_params()), BfgsOptions{}).s_min;
}

// Component-wise relative error, absolute below 1e-8.
double gradient_error(const QbmModel& model, std::mt19937_64& rng, int trials) {
  std::uniform_real_distribution<double> ur(0.0, 1.0), uphi(0.0, 2 * kPi), ua(-1.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const double r = ur(rng);
    const double phi = uphi(rng);
    const auto target = target_state(r, phi).density();
    RealVector v(static_cast<Eigen::Index>(model.n_params()));
    for (auto& x : v) x = ua(rng);
    const ParamVector a(std::move(v));
    const RealVector g = model.has_hidden() ? grad_hidden(model, target, a) : grad_visible(model, target, a);
    const RealVector fd = finite_diff_grad(model, target, a, 1e-5);
    for (Eigen::Index i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(g(i) - fd(i)) / std::max(std::abs(fd(i)), 1e-8));
  }
  return worst;
}

bool in_interior_quadrant(double phi) { return (phi > 0 && phi < kPi / 2) || (phi > kPi && phi < 1.5 * kPi); }

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& line) {
  std::vector<std::string> args{"qbm"};
  std::istringstream in(line);
  for (std::string w; in >> w;) args.push_back(w);
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

int main() {
  const auto visible = visible_model_2q();
  const auto hidden = hidden_model_3q();

  criterion(1, "gradient correctness", [&] {
    std::mt19937_64 rng(101);
    const double ev = gradient_error(visible, rng, 100);
    const double eh = gradient_error(hidden, rng, 100);
    return Outcome{ev < 1e-5 && eh < 1e-5,
                   "max rel err visible " + fmt("%.2e", ev) + ", hidden " + fmt("%.2e", eh) + " over 100 each, tol 1e-5"};
  });

  criterion(2, "visible quadrant minima", [&] {
    double worst = 0.0;
    int n = 0;
    for (double r : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (double f : {0.1, 0.25, 0.4, 1.15, 1.35}) {
        worst = std::max(worst, train_visible(r, f * kPi));
        ++n;
      }
    }
    return Outcome{worst < 0.01 && n == 25, "max s_min " + fmt("%.3e", worst) + " bits over 25 points, tol 0.01"};
  });

  criterion(3, "landmark values", [&] {
    double worst = 0.0;
    for (double f : {0.0, 0.3, 0.75, 1.2, 1.75}) worst = std::max(worst, std::abs(train_visible(0.0, f * kPi) - 1.0));
    const double s1 = train_visible(std::sqrt(0.5), 0.75 * kPi);
    const double s2 = train_visible(std::sqrt(0.5), 1.75 * kPi);
    worst = std::max({worst, std::abs(s1 - 2.0), std::abs(s2 - 2.0)});
    return Outcome{worst <= 0.01, "centre vs 1 and diagonal points " + fmt("%.6f", s1) + ", " + fmt("%.6f", s2) +
                                      " vs 2, max dev " + fmt("%.2e", worst) + ", tol 0.01"};
  });

  criterion(4, "analytic baselines", [&] {
    double rim = 0.0, period = 0.0, diag = 0.0;
    for (int k = 0; k < 24; ++k) {
      const double phi = k * kPi / 12;
      const double s = train_visible(1.0, phi);
      rim = std::max(rim, std::abs(s - baseline_r1(phi)));
      period = std::max(period, std::abs(train_visible(1.0, phi + kPi / 2) - s));
    }
    for (int i = 0; i <= 10; ++i) {
      const double r = i / 10.0;
      diag = std::max(diag, std::abs(train_visible(r, 0.75 * kPi) - baseline_phi_3pi4(r)));
    }
    return Outcome{rim < 0.02 && period < 0.02 && diag < 0.02,
                   "rim " + fmt("%.2e", rim) + ", periodicity " + fmt("%.2e", period) + ", 3pi/4 ray " +
                       fmt("%.2e", diag) + ", tol 0.02"};
  });

  criterion(5, "hidden layer improvement", [&] {
    MultiStartOptions ms;
    ms.n_starts = 200;
    ms.init = InitSpec::uniform(-2, 2);
    ms.seed = 2024;
    const auto best = multi_start(hidden, target_state(std::sqrt(0.5), 0.75 * kPi).density(), BfgsOptions{}, ms).best;
    ms.n_starts = 20;
    double rim = 0.0;
    for (int k = 0; k < 12; ++k) {
      const double phi = k * kPi / 6 + 0.1;
      const auto res = multi_start(hidden, target_state(1.0, phi).density(), BfgsOptions{}, ms).best;
      rim = std::max(rim, std::abs(res.s_min - baseline_r1(phi)));
    }
    return Outcome{best.s_min <= 1.05 && rim < 0.02,
                   "best of 200 starts " + fmt("%.6f", best.s_min) + " bits (tol 1.05), rim dev " + fmt("%.2e", rim) +
                       " (tol 0.02)"};
  });

  criterion(6, "symmetry invariance", [&] {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> ur(0.0, 1.0), uphi(0.0, 2 * kPi), ua(-2.0, 2.0);
    double worst = 0.0;
    for (const auto& op : all_symmetry_ops()) {
      for (int t = 0; t < 100; ++t) {
        const double r = ur(rng);
        const double phi = uphi(rng);
        RealVector v(static_cast<Eigen::Index>(hidden.n_params()));
        for (auto& x : v) x = ua(rng);
        const auto c = symmetry_invariance_check(r, phi, ParamVector(std::move(v)), op, hidden);
        worst = std::max(worst, std::abs(c.lhs - c.rhs));
      }
    }
    MultiStartOptions ms;
    const auto table = sweep(visible, SweepGrid::standard(), BfgsOptions{}, ms);
    const auto mirror = mirror_residuals(table);
    const double mirror_worst = std::max(mirror.diagonal, mirror.anti_diagonal);
    return Outcome{worst < 1e-9 && mirror_worst <= 0.02 && mirror.pairs > 0,
                   "16 ops x 100 max diff " + fmt("%.2e", worst) + " (tol 1e-9), mirror y=x " +
                       fmt("%.2e", mirror.diagonal) + ", y=-x " + fmt("%.2e", mirror.anti_diagonal) + " over " +
                       std::to_string(mirror.pairs) + " pairs (tol 0.02)"};
  });

  criterion(7, "geometry dichotomy", [&] {
    int disagreements = 0, singular = 0, low_fidelity = 0, quadrant_cells = 0;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double r = (i + 0.5) / 20, phi = (j + 0.37) * kPi / 10;
        const auto cert = ground_state_certificate(r, phi);
        try {
          if (cert.boundary != (hessian_det(r, phi) > 0)) ++disagreements;
        } catch (const SingularityError&) {
          ++singular;
        }
        if (in_interior_quadrant(phi)) {
          ++quadrant_cells;
          if (!(cert.fidelity > 1 - 1e-8)) ++low_fidelity;
        }
      }
    }
    return Outcome{disagreements == 0 && singular == 0 && low_fidelity == 0,
                   std::to_string(disagreements) + " disagreements, " + std::to_string(singular) +
                       " singular cells, " + std::to_string(low_fidelity) + "/" + std::to_string(quadrant_cells) +
                       " quadrant cells below fidelity 1-1e-8"};
  });

  criterion(8, "optimality identities", [&] {
    std::mt19937_64 rng(808);
    std::uniform_real_distribution<double> ur(0.0, 1.0), uphi(0.0, 2 * kPi);
    double moment = 0.0, identity = 0.0;
    // Runs stopped by rounding noise before the gradient tolerance still
    // have to satisfy both identities.
    int unconverged = 0;
    for (int t = 0; t < 50; ++t) {
      const double r = ur(rng);
      const double phi = uphi(rng);
      const auto target = target_state(r, phi).density();
      const auto res = minimize(visible, target, ParamVector::zeros(visible.n_params()), BfgsOptions{});
      if (!res.converged) ++unconverged;
      const auto rho = visible_state(visible, res.a_opt);
      const auto m_rho = moments(rho, visible.basis());
      const auto m_target = moments(target, visible.basis());
      for (std::size_t i = 0; i < m_rho.size(); ++i) moment = std::max(moment, std::abs(m_rho[i] - m_target[i]));
      identity =
          std::max(identity, std::abs(res.s_min - (von_neumann_entropy(rho) - von_neumann_entropy(target))));
    }
    return Outcome{moment < 1e-6 && identity < 1e-6,
                   "moment residual " + fmt("%.2e", moment) + ", entropy identity " + fmt("%.2e", identity) +
                       " bits over 50 targets (" + std::to_string(unconverged) +
                       " stopped at the precision floor), tol 1e-6"};
  });

  criterion(9, "determinism", [&] {
    const fs::path dir = fs::temp_directory_path() / ("qbm_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::string> commands{
        "train --model hidden3q --r 0.7071067811865476 --phi 0.75 --starts 20 --init uniform:-2:2 --seed 5",
        "sweep",
        "sweep --model hidden3q --grid-r 0:1:3 --grid-phi 0:2:5 --starts 2 --init uniform:-2:2 --seed 1",
        "baseline --mode r1",
        "geometry --samples 100000 --seed 3",
        "symcheck --trials 100 --seed 6",
        "gradcheck --trials 100 --model hidden3q --seed 6",
    };
    int mismatches = 0;
    for (std::size_t k = 0; k < commands.size(); ++k) {
      for (const char* format : {"csv", "json"}) {
        const std::string ext = std::string(".") + format;
        const fs::path a = dir / ("a" + std::to_string(k) + ext), b = dir / ("b" + std::to_string(k) + ext);
        const std::string base = commands[k] + " --format " + format;
        const int ca = run_cli(base + " --threads 1 --out " + a.string());
        const int cb = run_cli(base + " --out " + b.string());
        if (ca != cb || !fs::exists(a) || slurp(a) != slurp(b)) ++mismatches;
        const fs::path ca_cloud = dir / ("a" + std::to_string(k) + "_cloud" + ext);
        if (fs::exists(ca_cloud) && slurp(ca_cloud) != slurp(dir / ("b" + std::to_string(k) + "_cloud" + ext)))
          ++mismatches;
      }
    }
    fs::remove_all(dir);
    return Outcome{mismatches == 0, std::to_string(mismatches) + " mismatching outputs across " +
                                        std::to_string(2 * commands.size()) + " command reruns"};
  });

  return failures == 0 ? 0 : 1;
}
