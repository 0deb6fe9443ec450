#include <benchmark/benchmark.h>

#include "memberscope/io.hpp"
#include "memberscope/membership.hpp"

namespace ms = memberscope;

namespace {

const ms::MeasurementRecord& prep1() {
  static const ms::MeasurementRecord r =
      ms::io::load_experiment(std::string(MEMBERSCOPE_DATA_DIR) + "/prep1.json");
  return r;
}

ms::Partition bell_pair(double em, double ep) {
  return ms::Partition({ms::ReferenceSpec::named("Psi-", em), ms::ReferenceSpec::named("Psi+", ep)});
}

void BM_AssemblePovm(benchmark::State& state) {
  const auto& settings = state.range(0) == 1 ? ms::table1_settings() : ms::table2_settings();
  for (auto _ : state) benchmark::DoNotOptimize(ms::assemble_povm(std::span(settings)));
}
BENCHMARK(BM_AssemblePovm)->Arg(1)->Arg(2);

void BM_PerturbationKernel(benchmark::State& state) {
  const ms::Povm povm = ms::io::load_povm(state.range(0) == 1 ? "table1" : "table2");
  for (auto _ : state) benchmark::DoNotOptimize(povm.perturbation_kernel());
}
BENCHMARK(BM_PerturbationKernel)->Arg(1)->Arg(2);

void BM_SolvablePure(benchmark::State& state) {
  const ms::Povm povm = ms::io::load_povm("table1");
  const ms::PureState phi = ms::named_state("Psi-");
  for (auto _ : state) benchmark::DoNotOptimize(ms::solvable_pure(povm, phi));
}
BENCHMARK(BM_SolvablePure);

void BM_Fidelity(benchmark::State& state) {
  const ms::DensityMatrix a = ms::random_density(1, 4);
  const ms::DensityMatrix b = ms::random_density(2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(ms::fidelity(a, b));
}
BENCHMARK(BM_Fidelity);

// Single constrained fit: the segment that reproduces the data, and one
// that does not.
void BM_Fit(benchmark::State& state) {
  const ms::Povm povm = ms::io::load_povm("table1");
  const ms::Partition part = bell_pair(0.5, 0.5);
  const ms::FitProblem problem{prep1().combined_probabilities(), povm,
                               ms::segment_linear_constraints(part, part.segment(
                                   static_cast<std::uint32_t>(state.range(0))))};
  for (auto _ : state) benchmark::DoNotOptimize(ms::constrained_l1_fit(problem));
}
BENCHMARK(BM_Fit)->Arg(2)->Arg(0)->Unit(benchmark::kMillisecond);

void BM_Decide(benchmark::State& state) {
  const ms::Povm povm = ms::io::load_povm("table1");
  const ms::Partition part = bell_pair(0.7, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(ms::decide(prep1(), povm, part));
}
BENCHMARK(BM_Decide)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const ms::Povm povm = ms::io::load_povm("table1");
  std::vector<double> grid;
  for (int i = 1; i < state.range(0) + 1; ++i) grid.push_back(i / (state.range(0) + 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(ms::sweep(prep1(), povm, grid, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

// Linked against benchmark::benchmark rather than benchmark_main: the
// distribution's benchmark_main archive carries LTO bytecode from another
// compiler release.
BENCHMARK_MAIN();
