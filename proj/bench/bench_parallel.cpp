// Serial vs OpenMP wall time for the two parallel drivers.
//
//   bench_parallel [--threads N] [--starts N] [--repeat N]

#include "qbm/analysis.hpp"
#include "qbm/bfgs.hpp"
#include "qbm/model.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>

using namespace qbm;

namespace {

double best_seconds(int repeat, const std::function<void()>& fn) {
  double best = 1e300;
  for (int k = 0; k < repeat; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx  %s\n", name, serial, parallel, serial / parallel,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel timings"};
  int threads = 0;
  int starts = 40;
  int repeat = 3;
  app.add_option("--threads", threads, "worker threads, 0 for the OpenMP default")->check(CLI::NonNegativeNumber);
  app.add_option("--starts", starts, "multi-start runs")->check(CLI::PositiveNumber);
  app.add_option("--repeat", repeat, "repetitions, best time is reported")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::printf("threads: %d\n", threads > 0 ? threads : default_threads());
  int mismatches = 0;

  {
    const auto model = hidden_model_3q();
    const auto target = target_state(std::sqrt(0.5), 0.75 * std::numbers::pi).density();
    MultiStartOptions ms;
    ms.n_starts = starts;
    ms.init = InitSpec::uniform(-2, 2);
    ms.seed = 1;
    ms.threads = threads;
    MultiStartResult serial_res, parallel_res;
    ms.execution = Execution::serial;
    const double ts = best_seconds(repeat, [&] { serial_res = multi_start(model, target, BfgsOptions{}, ms); });
    ms.execution = Execution::parallel;
    const double tp = best_seconds(repeat, [&] { parallel_res = multi_start(model, target, BfgsOptions{}, ms); });
    const bool same = serial_res.best.s_min == parallel_res.best.s_min && serial_res.best_index == parallel_res.best_index;
    mismatches += !same;
    report("multi_start hidden3q", ts, tp, same);
  }

  {
    const auto model = visible_model_2q();
    MultiStartOptions ms;
    ms.threads = threads;
    SweepTable serial_res, parallel_res;
    ms.execution = Execution::serial;
    const double ts = best_seconds(repeat, [&] { serial_res = sweep(model, SweepGrid::standard(), BfgsOptions{}, ms); });
    ms.execution = Execution::parallel;
    const double tp =
        best_seconds(repeat, [&] { parallel_res = sweep(model, SweepGrid::standard(), BfgsOptions{}, ms); });
    bool same = serial_res.cells.size() == parallel_res.cells.size();
    for (std::size_t k = 0; same && k < serial_res.cells.size(); ++k)
      same = serial_res.cells[k].s_min == parallel_res.cells[k].s_min;
    mismatches += !same;
    report("sweep visible2q 21x121", ts, tp, same);
  }

  return mismatches == 0 ? 0 : 1;
}
