#include "qbm/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace qbm {

void BfgsOptions::validate() const {
  if (max_iter < 0) throw std::invalid_argument("max_iter must be non-negative");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("grad_tol must be positive");
  if (!(step_tol >= 0.0)) throw std::invalid_argument("step_tol must be non-negative");
  if (!(wolfe_c1 > 0.0 && wolfe_c1 < wolfe_c2 && wolfe_c2 < 1.0)) {
    throw std::invalid_argument("Wolfe constants must satisfy 0 < c1 < c2 < 1");
  }
  if (max_line_search < 1) throw std::invalid_argument("max_line_search must be at least 1");
  if (!(param_cap > 0.0)) throw std::invalid_argument("param_cap must be positive");
}

namespace {

struct Sample {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
};

// Minimizer of the cubic through (lo, hi) values and slopes, safeguarded
// to the interior of the bracket; bisection when the cubic is unusable.
double interpolate(const Sample& lo, const Sample& hi) {
  const double a = lo.alpha;
  const double b = hi.alpha;
  const double d1 = lo.slope + hi.slope - 3.0 * (lo.value - hi.value) / (a - b);
  const double disc = d1 * d1 - lo.slope * hi.slope;
  const double mid = 0.5 * (a + b);
  if (!(disc >= 0.0)) return mid;
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = hi.slope - lo.slope + 2.0 * d2;
  if (denom == 0.0) return mid;
  const double t = b - (b - a) * (hi.slope + d2 - d1) / denom;
  const double left = std::min(a, b);
  const double right = std::max(a, b);
  const double margin = 0.1 * (right - left);
  if (!std::isfinite(t) || t < left + margin || t > right - margin) {
    // Accept an interior interpolant even close to the ends so exact
    // quadratic minimizers are not thrown away.
    if (std::isfinite(t) && t > left && t < right) return t;
    return mid;
  }
  return t;
}

}  // namespace

LineSearchResult line_search(const LineFunction& phi, double value0, double slope0, double alpha_max,
                             const BfgsOptions& opts) {
  if (!(slope0 < 0.0)) throw std::invalid_argument("line_search: direction is not a descent direction");
  if (!(alpha_max > 0.0)) throw std::invalid_argument("line_search: alpha_max must be positive");

  const double c1 = opts.wolfe_c1;
  const double c2 = opts.wolfe_c2;
  LineSearchResult res;
  const auto armijo = [&](const Sample& s) { return s.value <= value0 + c1 * s.alpha * slope0; };
  const auto curvature = [&](const Sample& s) { return std::abs(s.slope) <= -c2 * slope0; };
  const auto eval = [&](double alpha) {
    auto [v, d] = phi(alpha);
    ++res.evaluations;
    if (!std::isfinite(v) || !std::isfinite(d)) {
      v = std::numeric_limits<double>::infinity();
      d = std::numeric_limits<double>::infinity();
    }
    return Sample{alpha, v, d};
  };
  const auto finish = [&](const Sample& s, bool wolfe) {
    res.step = s.alpha;
    res.value = s.value;
    res.slope = s.slope;
    res.success = s.alpha > 0.0;
    res.wolfe = wolfe && res.success;
    res.at_max = s.alpha == alpha_max;
    return res;
  };

  const auto zoom = [&](Sample lo, Sample hi) {
    while (res.evaluations < opts.max_line_search) {
      const Sample s = eval(interpolate(lo, hi));
      if (!armijo(s) || s.value >= lo.value) {
        hi = s;
      } else {
        if (curvature(s)) return finish(s, true);
        if (s.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = s;
      }
      if (std::abs(hi.alpha - lo.alpha) <= std::numeric_limits<double>::epsilon() * std::abs(lo.alpha)) break;
    }
    // lo always carries sufficient decrease once it moved off zero.
    return finish(lo, false);
  };

  Sample prev{0.0, value0, slope0};
  double alpha = std::min(1.0, alpha_max);
  bool first = true;
  while (res.evaluations < opts.max_line_search) {
    const Sample s = eval(alpha);
    if (!armijo(s) || (!first && s.value >= prev.value)) return zoom(prev, s);
    if (curvature(s)) return finish(s, true);
    if (s.slope >= 0.0) return zoom(s, prev);
    if (alpha >= alpha_max) return finish(s, false);
    prev = s;
    first = false;
    alpha = std::min(2.0 * alpha, alpha_max);
  }
  return finish(prev, false);
}

namespace {

double cap_step_limit(const RealVector& x, const RealVector& d, double cap) {
  double limit = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (d(i) > 0.0) limit = std::min(limit, (cap - x(i)) / d(i));
    if (d(i) < 0.0) limit = std::min(limit, (-cap - x(i)) / d(i));
  }
  return limit;
}

}  // namespace

OptimResult minimize(const RelativeEntropyObjective& objective, const ParamVector& a0, const BfgsOptions& opts) {
  opts.validate();
  const auto n = static_cast<Eigen::Index>(objective.model().n_params());
  if (static_cast<Eigen::Index>(a0.size()) != n) {
    throw std::invalid_argument("minimize: initial point length does not match the basis");
  }
  const double cap = opts.param_cap;

  OptimResult res;
  RealVector x = a0.values().cwiseMax(-cap).cwiseMin(cap);
  auto ev = objective.evaluate(x);
  if (!ev.finite) {
    res.a_opt = ParamVector(x);
    res.s_min = nats_to_bits(ev.value);
    res.status = "non-finite objective at the initial point";
    return res;
  }
  double f = ev.value;
  RealVector g = ev.grad;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;
  bool just_reset = false;
  std::vector<bool> active(static_cast<std::size_t>(n), false);
  RealVector pg(n);

  const auto update_active = [&] {
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Held at the cap while descent would push it further out.
      const bool held = std::abs(x(i)) >= cap * (1.0 - 1e-12) && g(i) * x(i) < 0.0;
      active[static_cast<std::size_t>(i)] = held;
      pg(i) = held ? 0.0 : g(i);
      any = any || held;
    }
    return any;
  };
  const auto mask = [&](RealVector& v) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)]) v(i) = 0.0;
    }
  };

  if (opts.record_history) res.history.emplace_back(0, nats_to_bits(f));
  int iter = 0;
  bool any_active = update_active();
  res.status = "max_iter reached";
  for (;;) {
    const double gnorm = pg.norm();
    res.grad_norm = gnorm;
    if (gnorm < opts.grad_tol) {
      res.converged = true;
      res.boundary = any_active;
      res.status = any_active ? "converged at the parameter cap" : "gradient tolerance reached";
      break;
    }
    if (iter >= opts.max_iter) break;

    RealVector d = -(h_inv * pg);
    mask(d);
    if (!(pg.dot(d) < 0.0)) {
      h_inv.setIdentity();
      ++res.hessian_resets;
      d = -pg;
    }
    // Drop components that sit on the cap and would leave the box.
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(x(i)) >= cap * (1.0 - 1e-12) && d(i) * x(i) > 0.0) d(i) = 0.0;
    }
    if (!(pg.dot(d) < 0.0)) {
      d = -pg;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(x(i)) >= cap * (1.0 - 1e-12) && d(i) * x(i) > 0.0) d(i) = 0.0;
      }
    }
    const double slope0 = g.dot(d);
    const double alpha_max = cap_step_limit(x, d, cap);
    if (!(slope0 < 0.0) || !(alpha_max > 0.0)) {
      res.status = "no feasible descent direction";
      break;
    }

    std::vector<std::pair<double, RelativeEntropyObjective::Evaluation>> probes;
    const LineFunction along = [&](double alpha) {
      const RealVector xt = (x + alpha * d).cwiseMax(-cap).cwiseMin(cap);
      auto e = objective.evaluate(xt);
      const double value = e.value;
      const double slope = e.finite ? e.grad.dot(d) : std::numeric_limits<double>::infinity();
      probes.emplace_back(alpha, std::move(e));
      return std::pair{value, slope};
    };
    const LineSearchResult ls = line_search(along, f, slope0, alpha_max, opts);
    if (!ls.success) {
      if (just_reset) {
        res.status = "line search failed";
        break;
      }
      h_inv.setIdentity();
      ++res.hessian_resets;
      just_reset = true;
      ++iter;
      continue;
    }
    just_reset = false;

    const RealVector x_new = (x + ls.step * d).cwiseMax(-cap).cwiseMin(cap);
    const auto accepted = std::find_if(probes.begin(), probes.end(), [&](const auto& p) { return p.first == ls.step; });
    const auto ev_new = std::move(accepted->second);
    const RealVector s = x_new - x;
    const RealVector y = ev_new.grad - g;
    x = x_new;
    f = ev_new.value;
    g = ev_new.grad;
    ++iter;
    if (opts.record_history) res.history.emplace_back(iter, nats_to_bits(f));

    const double sy = s.dot(y);
    if (sy > 1e-12) {
      if (!scaled) {
        h_inv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const RealVector hy = h_inv * y;
      // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
      h_inv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
      h_inv = 0.5 * (h_inv + h_inv.transpose()).eval();
    } else {
      ++res.skipped_updates;
    }

    any_active = update_active();
    if (s.norm() < opts.step_tol) {
      res.grad_norm = pg.norm();
      res.converged = true;
      res.boundary = any_active;
      res.status = "step tolerance reached";
      break;
    }
  }

  res.iterations = iter;
  res.boundary = res.boundary || x.cwiseAbs().maxCoeff() >= cap * (1.0 - 1e-3);
  res.a_opt = ParamVector(x);
  res.s_min = nats_to_bits(f);
  return res;
}

OptimResult minimize(const QbmModel& model, const DensityMatrix& target, const ParamVector& a0,
                     const BfgsOptions& opts) {
  return minimize(RelativeEntropyObjective(model, target), a0, opts);
}

void MultiStartOptions::validate() const {
  if (n_starts < 1) throw std::invalid_argument("n_starts must be at least 1");
  if (init.kind == InitSpec::Kind::uniform && !(init.lo < init.hi)) {
    throw std::invalid_argument("uniform init requires lo < hi");
  }
  if (threads < 0) throw std::invalid_argument("threads must be non-negative");
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

ParamVector initial_point(const MultiStartOptions& ms, std::size_t n_params, std::size_t run_index) {
  if (ms.init.kind == InitSpec::Kind::constant) return ParamVector::constant(n_params, ms.init.value);
  std::mt19937_64 rng(splitmix64(ms.seed ^ splitmix64(static_cast<std::uint64_t>(run_index))));
  RealVector v(static_cast<Eigen::Index>(n_params));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    // 53 random mantissa bits; std::uniform_real_distribution is not
    // reproducible across standard libraries.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v(i) = ms.init.lo + (ms.init.hi - ms.init.lo) * u;
  }
  return ParamVector(std::move(v));
}

MultiStartResult multi_start(const QbmModel& model, const DensityMatrix& target, const BfgsOptions& bfgs,
                             const MultiStartOptions& ms) {
  bfgs.validate();
  ms.validate();
  const RelativeEntropyObjective objective(model, target);
  MultiStartResult out;
  out.all.resize(static_cast<std::size_t>(ms.n_starts));
  for_each_index(out.all.size(), ms.execution, ms.threads, [&](std::size_t i) {
    out.all[i] = minimize(objective, initial_point(ms, model.n_params(), i), bfgs);
  });
  for (std::size_t i = 1; i < out.all.size(); ++i) {
    if (out.all[i].s_min < out.all[out.best_index].s_min) out.best_index = i;
  }
  out.best = out.all[out.best_index];
  return out;
}

}  // namespace qbm
