#include <benchmark/benchmark.h>

#include "tbound/cluster_transduce.hpp"
#include "tbound/concentration.hpp"
#include "tbound/exact_hypergeom.hpp"
#include "tbound/pac_bayes.hpp"
#include "tbound/validation.hpp"

namespace {

using namespace tbound;

void BM_LogBinomial(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state)
        for (std::int64_t r = 0; r <= n; r += std::max<std::int64_t>(1, n / 64))
            benchmark::DoNotOptimize(log_binomial(n, r));
}
BENCHMARK(BM_LogBinomial)->Arg(100)->Arg(10000)->Arg(1000000);

void BM_DeviationTail(benchmark::State& state)
{
    const auto m = state.range(0);
    const HypergeomSpec spec{m, m, m / 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(deviation_tail(0.1, spec));
}
BENCHMARK(BM_DeviationTail)->Arg(50)->Arg(500)->Arg(5000);

void BM_WorstCaseTail(benchmark::State& state)
{
    const auto m = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(worst_case_tail(0.1, m, m, DeviationKind::absolute));
}
BENCHMARK(BM_WorstCaseTail)->Arg(50)->Arg(200);

void BM_CriticalDeviation(benchmark::State& state)
{
    const auto m = state.range(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(critical_deviation(1.0 / 16.0, 0.05, m, m, DeviationKind::absolute));
}
BENCHMARK(BM_CriticalDeviation)->Arg(20)->Arg(100);

void BM_AnalyticBounds(benchmark::State& state)
{
    BoundInputs in;
    in.m = 1000;
    in.u = 1000;
    in.delta = 0.05;
    in.emp_risk = 0.1;
    in.complexity = PriorMass{1e-3};
    const auto pop = PopulationSummary::binary_population(2000, 300);
    for (auto _ : state) {
        benchmark::DoNotOptimize(deterministic_bound(in, DeterministicVariant::serfling));
        benchmark::DoNotOptimize(deterministic_bound(in, DeterministicVariant::direct));
        benchmark::DoNotOptimize(direct_binary_bound(pop, {1000, 0.05}));
    }
}
BENCHMARK(BM_AnalyticBounds);

void BM_ClusterSweep(benchmark::State& state)
{
    const auto data = two_blob_dataset();
    const auto alg = static_cast<ClusterAlgorithm>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(cluster_sweep(data, alg, 10));
    state.SetLabel(to_string(alg));
}
BENCHMARK(BM_ClusterSweep)->DenseRange(0, 2);

void BM_ValidityTrials(benchmark::State& state)
{
    const auto inst = random_labeling_instance(40, 20, 16, 7);
    for (auto _ : state)
        benchmark::DoNotOptimize(mc_bound_validity(ValidityScenario::serfling_det, inst, 0.05, 1000, 1, 1));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ValidityTrials)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
