#pragma once

// BFGS minimization of the QBM relative entropy, plus a multi-start driver.

#include "qbm/grad.hpp"
#include "qbm/parallel.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace qbm {

struct BfgsOptions {
  int max_iter = 500;
  double grad_tol = 1e-7;    // nats, Euclidean norm of the projected gradient
  double step_tol = 1e-12;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 40;  // objective evaluations per line search
  double param_cap = 1e4;    // bound on the infinity norm of the parameters
  bool record_history = false;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct OptimResult {
  ParamVector a_opt;
  double s_min = 0.0;  // bits
  int iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;  // nats
  /// Stopped with some |a_i| within 0.1% of the cap, whether or not the
  /// gradient along the free directions converged.
  bool boundary = false;
  int skipped_updates = 0;
  int hessian_resets = 0;
  std::string status;
  std::vector<std::pair<int, double>> history;  // (iteration, objective in bits)
};

/// phi(alpha) and phi'(alpha) along a fixed direction.
using LineFunction = std::function<std::pair<double, double>(double)>;

struct LineSearchResult {
  double step = 0.0;
  double value = 0.0;
  double slope = 0.0;
  int evaluations = 0;
  /// A step with sufficient decrease was found.
  bool success = false;
  /// Both strong Wolfe conditions hold at `step`.
  bool wolfe = false;
  /// The step was truncated at `alpha_max`.
  bool at_max = false;
};

/// Strong Wolfe line search (bracketing then zoom with cubic interpolation).
/// Throws std::invalid_argument unless slope0 < 0.
LineSearchResult line_search(const LineFunction& phi, double value0, double slope0, double alpha_max,
                             const BfgsOptions& opts);

OptimResult minimize(const RelativeEntropyObjective& objective, const ParamVector& a0, const BfgsOptions& opts);
OptimResult minimize(const QbmModel& model, const DensityMatrix& target, const ParamVector& a0,
                     const BfgsOptions& opts);

struct InitSpec {
  enum class Kind { constant, uniform };
  Kind kind = Kind::constant;
  double value = 0.0;  // constant
  double lo = -2.0;    // uniform
  double hi = 2.0;

  static InitSpec constant(double c) { return {Kind::constant, c, 0.0, 0.0}; }
  static InitSpec uniform(double lo, double hi) { return {Kind::uniform, 0.0, lo, hi}; }
};

struct MultiStartOptions {
  int n_starts = 1;
  InitSpec init = InitSpec::constant(0.0);
  std::uint64_t seed = 0;
  Execution execution = Execution::parallel;
  int threads = 0;  // 0 selects the OpenMP default

  void validate() const;
};

struct MultiStartResult {
  OptimResult best;
  std::size_t best_index = 0;
  std::vector<OptimResult> all;  // ordered by run index
};

/// Starting point of run `run_index`; depends only on (seed, run_index).
ParamVector initial_point(const MultiStartOptions& ms, std::size_t n_params, std::size_t run_index);

MultiStartResult multi_start(const QbmModel& model, const DensityMatrix& target, const BfgsOptions& bfgs,
                             const MultiStartOptions& ms);

}  // namespace qbm
