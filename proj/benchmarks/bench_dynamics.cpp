#include <benchmark/benchmark.h>

#include "pricedyn/diagnostics.hpp"
#include "pricedyn/discrete.hpp"
#include "pricedyn/dynamics.hpp"

using namespace pricedyn;

namespace {

DemandModel sphere_model(int n) {
  Matrix m = -2.0 * Matrix::Identity(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    m(i, i + 1) = 0.5;
    m(i + 1, i) = -0.3;
  }
  return DemandModel::linear(m, Vector::Constant(n, 1.0 / std::sqrt(n)));
}

void BM_StepSphere(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto model = sphere_model(n);
  const auto params = DynamicsParams::uniform(n, 1.0, 0.5, 1e-3, 1.0);
  Vector p = Vector::LinSpaced(n, 1.0, 2.0);
  SphereState s{p / p.norm(), Vector::Zero(n)};
  for (auto _ : state) {
    s = step_sphere(s, model, params);
    benchmark::DoNotOptimize(s.p.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_StepSphere)->Arg(2)->Arg(8)->Arg(32);

void BM_IntegrateFlatTwoPrice(benchmark::State& state) {
  LinearTwoPriceSpec spec;
  spec.alpha = 2;
  spec.delta = 0.5;
  const auto params = DynamicsParams::uniform(2, 1.0, 1.0, 1e-3, 10.0, 10);
  Vector q0(2), qd0(2);
  q0 << 0.1, 0.0;
  qd0 << 0.0, 0.0;
  for (auto _ : state) {
    auto traj = integrate_flat(FlatState{q0, qd0}, spec, params);
    benchmark::DoNotOptimize(traj.samples.back().x.data());
  }
  state.SetItemsProcessed(state.iterations() * params.steps());
}
BENCHMARK(BM_IntegrateFlatTwoPrice)->Unit(benchmark::kMillisecond);

void BM_EnergyBalanceResidual(benchmark::State& state) {
  LinearTwoPriceSpec spec;
  spec.alpha = 2;
  spec.beta = 1;
  Vector q0(2), qd0(2);
  q0 << 0.1, 0.05;
  qd0 << 0.0, 0.0;
  const auto traj = integrate_flat(FlatState{q0, qd0}, spec, DynamicsParams::uniform(2, 1.0, 1.0, 1e-3, 10.0));
  for (auto _ : state) {
    auto r = energy_balance_residual(traj);
    benchmark::DoNotOptimize(r.max_abs);
  }
}
BENCHMARK(BM_EnergyBalanceResidual)->Unit(benchmark::kMicrosecond);

void BM_DiscreteLaggard(benchmark::State& state) {
  const auto model = sphere_model(4);
  DiscreteAgentSpec spec;
  spec.f_a = 0.5;
  spec.mu = 0.3;
  spec.nu = 0.6;
  DiscreteState s;
  s.p_bar = Vector::Constant(4, 0.6);
  s.dp_prev = Vector::Zero(4);
  for (auto _ : state) {
    s = step_laggard(s, spec, model);
    benchmark::DoNotOptimize(s.p_bar.data());
  }
}
BENCHMARK(BM_DiscreteLaggard);

}  // namespace
BENCHMARK_MAIN();
