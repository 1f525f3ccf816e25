#include <benchmark/benchmark.h>

#include "qecml/costmodel.h"
#include "qecml/gates.h"
#include "qecml/qed422.h"
#include "qecml/qvc.h"
#include "qecml/rng.h"
#include "qecml/state.h"

namespace {

using namespace qecml;

void bm_apply_1q(benchmark::State& state) {
  const int n_qubits = static_cast<int>(state.range(0));
  PureState psi = PureState::basis(n_qubits, 0);
  const Eigen::Matrix2cd hadamard = gates::h();
  int q = 0;
  for (auto _ : state) {
    psi.apply_1q(hadamard, q);
    q = (q + 1) % n_qubits;
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_apply_1q)->Arg(10)->Arg(16)->Arg(20);

void bm_apply_cnot(benchmark::State& state) {
  const int n_qubits = static_cast<int>(state.range(0));
  PureState psi = PureState::basis(n_qubits, 0);
  psi.apply_h(0);
  int q = 0;
  for (auto _ : state) {
    psi.apply_cnot(q, (q + 1) % n_qubits);
    q = (q + 1) % n_qubits;
    benchmark::DoNotOptimize(psi.amplitudes().data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_apply_cnot)->Arg(10)->Arg(16)->Arg(20);

void bm_parity_trajectories(benchmark::State& state) {
  PauliInjectionSpec spec;
  spec.rate = 5e-3;
  qed422::LogicalParityEvaluator evaluator(1.234, static_cast<int>(state.range(0)),
                                           spec);
  Rng rng(99);
  for (auto _ : state) {
    const auto result = evaluator.evaluate(1, 0, 256, rng);
    benchmark::DoNotOptimize(result.z1_expectation);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(bm_parity_trajectories)->Arg(0)->Arg(2)->Arg(5);

void bm_qvc_forward_exact(benchmark::State& state) {
  QvcArchitecture arch;
  std::vector<double> params(static_cast<size_t>(arch.parameter_count()), 0.3);
  const Dataset data = synthetic_multiclass(1 << arch.n_qubits, arch.n_outputs(), 2, 7);
  ForwardOptions options;
  options.noise.p_1q = 2e-3;
  options.noise.p_2q = 2e-3;
  options.shots = 0;
  size_t row = 0;
  for (auto _ : state) {
    const ForwardResult result =
        forward(arch, params, data.samples[row % data.samples.size()], options);
    benchmark::DoNotOptimize(result.z_expectations.data());
    ++row;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_qvc_forward_exact);

void bm_resource_estimate(benchmark::State& state) {
  EstimateRequest request;
  request.eps_total = 1e-4;
  request.shape.layers = 100;
  for (auto _ : state) {
    const ResourceEstimate result = estimate(request);
    benchmark::DoNotOptimize(result.runtime_ms);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_resource_estimate);

}  // namespace

BENCHMARK_MAIN();
