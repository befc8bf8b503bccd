// Microbenchmarks of the numerical kernels: complex log-Gamma, the shifted
// symbol, factor evaluation, the Fourier-side solution, and one application
// of the discretized operator.

#include <benchmark/benchmark.h>

#include "coag/complex_special.hpp"
#include "coag/direct_solver.hpp"
#include "coag/fundamental_solution.hpp"
#include "coag/symbols.hpp"
#include "coag/wiener_hopf.hpp"

namespace {

using coag::Complex;

void BM_LogGamma(benchmark::State& state) {
  Complex z{3.7, 41.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(coag::log_gamma(z));
    z += Complex{1e-9, 1e-9};
  }
}
BENCHMARK(BM_LogGamma);

void BM_Phi(benchmark::State& state) {
  const coag::KernelParams p(1.5);
  Complex xi{12.0, 1.9};
  for (auto _ : state) {
    benchmark::DoNotOptimize(coag::eval_Phi(xi, p));
    xi += Complex{1e-9, 0.0};
  }
}
BENCHMARK(BM_Phi);

void BM_EvalV(benchmark::State& state) {
  static coag::WienerHopfFactor f{coag::KernelParams(1.5)};
  double re = -4.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.eval_V(Complex{re, f.beta1() - 0.1}));
    re += 1e-7;  // defeat the quantized cache
  }
}
BENCHMARK(BM_EvalV);

void BM_Ghat(benchmark::State& state) {
  static coag::WienerHopfFactor f{coag::KernelParams(1.5)};
  static coag::FundamentalSolution fs{f};
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fs.eval_Ghat(t, Complex{2.0, 1.8}, 1e-9));
    t += 1e-9;
  }
}
BENCHMARK(BM_Ghat);

void BM_ApplyL(benchmark::State& state) {
  const coag::KernelParams p(1.5);
  auto tpl = coag::GridFunction::log_grid(1e-3, 1e3, state.range(0));
  auto g = coag::mollified_delta(tpl, 1.0, 4.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(coag::apply_L(g, p));
  }
}
BENCHMARK(BM_ApplyL)->Arg(512)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
