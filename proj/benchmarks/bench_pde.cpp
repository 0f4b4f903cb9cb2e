#include <benchmark/benchmark.h>

#include "frontlab/ode.hpp"
#include "frontlab/pde.hpp"

namespace {

using namespace frontlab;

void BM_SimulatorStep(benchmark::State& state) {
  const auto set = ode::constant_set(ode::HomParams{});
  pde::DomainSpec domain{-50.0, 250.0, static_cast<std::size_t>(state.range(0)),
                         pde::BoundaryKind::neumann};
  pde::Simulator sim(set, domain);
  pde::InitialData init;
  init.left = -10.0;
  init.right = 0.0;
  auto s = sim.initial_state(init);
  for (auto _ : state) sim.step(s, 0.02);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatorStep)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_StationaryProfile(benchmark::State& state) {
  coefficients::Coefficients c;
  c.r_u = coefficients::CoefficientSpec::cosine(1.0, 0.5, 0.0);
  c.r_v = coefficients::CoefficientSpec::cosine(1.0, 0.5, 0.5);
  const coefficients::CoefficientSet set(1.0, c);
  pde::StationaryOptions options;
  options.check_hair_trigger = false;
  for (auto _ : state) benchmark::DoNotOptimize(pde::stationary_profile(set, options).residual);
}
BENCHMARK(BM_StationaryProfile)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
