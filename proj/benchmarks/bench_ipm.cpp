#include <benchmark/benchmark.h>

#include "sepscan/ipm.hpp"

namespace {

using namespace sepscan;

// Two well-separated blobs (odd rows +1, even rows -1), deterministic LCG
// noise; sized to exercise the normal-equation kernel.
BinaryProblem blob_problem(int n, int d, bool separable) {
  RowMatrixXd X(n, d);
  Eigen::VectorXd y(n);
  uint64_t state = 0x2545F4914F6CDD1DULL;
  auto uniform = [&]() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(state >> 11) / double(1ULL << 53);
  };
  for (int i = 0; i < n; ++i) {
    y[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const double shift = separable ? (y[i] > 0 ? 0.75 : 0.25) : 0.5;
    for (int k = 0; k < d; ++k) X(i, k) = 0.2 * uniform() + shift - 0.1;
  }
  return make_synthetic_problem(std::move(X), std::move(y));
}

void BM_SolvePhase1(benchmark::State& state) {
  const int n = int(state.range(0));
  const int d = int(state.range(1));
  const BinaryProblem p = blob_problem(n, d, state.range(2) != 0);
  const PhaseOneLP lp = assemble_phase1(p);
  const IpmConfig cfg;
  int iters = 0;
  for (auto _ : state) {
    IpmResult r = solve_phase1(lp, cfg);
    benchmark::DoNotOptimize(r.primal_obj);
    iters = r.iterations;
  }
  state.counters["iters"] = iters;
}

void BM_AssemblePhase1(benchmark::State& state) {
  const BinaryProblem p = blob_problem(int(state.range(0)), 256, true);
  for (auto _ : state) {
    PhaseOneLP lp = assemble_phase1(p);
    benchmark::DoNotOptimize(lp.M.data());
  }
}

}  // namespace

BENCHMARK(BM_SolvePhase1)
    ->Args({512, 64, 1})
    ->Args({512, 64, 0})
    ->Args({4096, 256, 1})
    ->Args({4096, 256, 0})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssemblePhase1)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
