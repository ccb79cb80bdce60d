#include "proactive/metrics.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace proactive;

namespace {

LabelVector runs(std::size_t n, double flip, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution coin(flip);
    LabelVector out(n);
    std::uint8_t state = 0;
    for (auto& v : out) {
        if (coin(gen)) state ^= 1;
        v = state;
    }
    return out;
}

} // namespace

static void BM_EvaluateMetrics(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto truth = runs(n, 0.01, 4);
    const auto pred = runs(n, 0.05, 5);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_metrics(pred, truth));
}
BENCHMARK(BM_EvaluateMetrics)->Arg(10000)->Arg(100000);

BENCHMARK_MAIN();
