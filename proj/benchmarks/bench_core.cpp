#include <benchmark/benchmark.h>

#include "mechint/gallery.hpp"
#include "mechint/identify.hpp"
#include "mechint/simulate.hpp"
#include "mechint/stats.hpp"

using namespace mechint;

namespace {

void BM_ParseDiagram(benchmark::State& state) {
    const std::string& text = gallery::diagram_text("latent_v");
    for (auto _ : state) {
        auto d = parse_diagram(text);
        benchmark::DoNotOptimize(d);
    }
}
BENCHMARK(BM_ParseDiagram);

void BM_DSeparated(benchmark::State& state) {
    auto d = gallery::diagram("latent_v");
    CiQuery q{{"Y"}, {"sAB"}, {"A", "B", "G", "M"}};
    for (auto _ : state) benchmark::DoNotOptimize(d_separated(d, q));
}
BENCHMARK(BM_DSeparated);

void BM_DSeparatedOracle(benchmark::State& state) {
    auto d = gallery::diagram("latent_v");
    CiQuery q{{"Y"}, {"sAB"}, {"A", "B", "G", "M"}};
    for (auto _ : state) benchmark::DoNotOptimize(d_separated_oracle(d, q));
}
BENCHMARK(BM_DSeparatedOracle);

void BM_Moralize(benchmark::State& state) {
    auto d = gallery::diagram("latent_v");
    NodeSet targets{"Y", "sAB", "A", "B", "G", "M", "V"};
    for (auto _ : state) {
        auto g = moralize(d, targets);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_Moralize);

void BM_PlanIdentification(benchmark::State& state) {
    auto d = gallery::diagram("latent_v");
    const auto& gc = gallery::golden_cases()[7];  // direct-effect case
    for (auto _ : state) {
        auto report = plan_identification(d, gc.roles, gc.query, gc.flags);
        benchmark::DoNotOptimize(report);
    }
}
BENCHMARK(BM_PlanIdentification);

void BM_SampleObservational(benchmark::State& state) {
    auto spec = gallery::stratified_point_null();
    auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto records = sample_observational(spec, n, 42);
        benchmark::DoNotOptimize(records);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SampleObservational)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_TestInteraction(benchmark::State& state) {
    auto spec = gallery::stratified_point_null();
    auto records = sample_observational(spec, static_cast<std::size_t>(state.range(0)), 42);
    TestConfig config;
    config.context_columns = {"G"};
    for (auto _ : state) {
        auto report = test_interaction(records, config);
        benchmark::DoNotOptimize(report);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TestInteraction)->Arg(10000)->Arg(100000);

void BM_PopulationCounts(benchmark::State& state) {
    auto spec = gallery::stratified_point_null();
    for (auto _ : state) {
        auto counts = population_counts(spec, 0.0, 0.0);
        benchmark::DoNotOptimize(counts);
    }
}
BENCHMARK(BM_PopulationCounts);

}  // namespace

BENCHMARK_MAIN();
