#include <benchmark/benchmark.h>

#include "frontlab/eigen.hpp"
#include "frontlab/speeds.hpp"

namespace {

using namespace frontlab;

coefficients::CoefficientSet heterogeneous() {
  coefficients::Coefficients c;
  c.sigma = coefficients::CoefficientSpec::cosine(1.0, 0.4, 0.1);
  c.r_u = coefficients::CoefficientSpec::cosine(1.0, 0.5, 0.3);
  c.r_v = coefficients::CoefficientSpec::cosine(0.5, 0.2, 0.7);
  c.mu_u = coefficients::CoefficientSpec::cosine(0.5, 0.2, 0.2);
  c.mu_v = coefficients::CoefficientSpec::constant(0.3);
  return coefficients::CoefficientSet(1.0, c);
}

void BM_PrincipalEigenpair(benchmark::State& state) {
  const auto set = heterogeneous();
  eigen::GridSpec grid;
  grid.n_cells = static_cast<std::size_t>(state.range(0));
  const auto op = eigen::build_operator(set, 1.0, grid);
  eigen::EigenOptions options;
  options.method = state.range(1) == 0 ? eigen::Method::resolvent : eigen::Method::shifted_power;
  for (auto _ : state) benchmark::DoNotOptimize(eigen::principal_eigenpair(op, options).value);
}
BENCHMARK(BM_PrincipalEigenpair)
    ->Args({64, 0})
    ->Args({256, 0})
    ->Args({4096, 0})
    ->Args({64, 1})
    ->Unit(benchmark::kMillisecond);

void BM_KOfLambdaRefined(benchmark::State& state) {
  const auto set = heterogeneous();
  const double lambda = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(eigen::k_of_lambda(set, lambda, {}).value);
}
BENCHMARK(BM_KOfLambdaRefined)->Arg(0)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_SpreadingSpeeds(benchmark::State& state) {
  const auto set = heterogeneous();
  for (auto _ : state) benchmark::DoNotOptimize(speeds::spreading_speeds(set, {}).c_right);
}
BENCHMARK(BM_SpreadingSpeeds)->Unit(benchmark::kMillisecond);

}  // namespace
