#include <benchmark/benchmark.h>

#include <nocprio/analysis.hpp>
#include <nocprio/simulator.hpp>

using namespace nocprio;

namespace {

NocModel topology(int which) {
    return which == 0 ? build_ring(8, deterministic_service(2)) : build_mesh(which, which, deterministic_service(2));
}

void BM_Analyze(benchmark::State& state) {
    const auto model = topology(static_cast<int>(state.range(0)));
    const auto shape = uniform_pattern(model);
    const auto traffic = shape.scaled(0.8 * stable_lambda_max(model, shape));
    const auto classes = instantiate_classes(model, traffic);
    for (auto _ : state) {
        auto report = end_to_end(model, classes, analyze(model, classes));
        benchmark::DoNotOptimize(report);
    }
    state.counters["pairs"] = static_cast<double>(classes.size());
    state.counters["per_pair"] = benchmark::Counter(static_cast<double>(classes.size()),
                                                    benchmark::Counter::kIsIterationInvariantRate |
                                                        benchmark::Counter::kInvert);
}
BENCHMARK(BM_Analyze)->Arg(0)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_StableLambdaMax(benchmark::State& state) {
    const auto model = topology(static_cast<int>(state.range(0)));
    const auto shape = uniform_pattern(model);
    for (auto _ : state)
        benchmark::DoNotOptimize(stable_lambda_max(model, shape));
}
BENCHMARK(BM_StableLambdaMax)->Arg(0)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
    const auto model = topology(static_cast<int>(state.range(0)));
    const auto shape = uniform_pattern(model);
    const auto traffic = shape.scaled(0.5 * stable_lambda_max(model, shape));
    SimConfig cfg;
    cfg.total_cycles = 100'000;
    for (auto _ : state) {
        auto report = simulate(model, traffic, cfg);
        benchmark::DoNotOptimize(report);
    }
    state.counters["cycles"] = benchmark::Counter(static_cast<double>(cfg.total_cycles),
                                                  benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
