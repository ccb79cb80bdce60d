#include "proactive/forecaster.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace proactive;

namespace {

ModelShape bench_shape(std::size_t hidden) {
    const auto schema = FeatureSchema::with_default_embedding({"a", "b", "c"}, {{"s", 3}, {"t", 2}});
    return make_shape(schema, 5, hidden, 10, 3);
}

Matrix bench_window(const ModelShape& shape) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix w(shape.window, shape.nodes());
    for (std::size_t t = 0; t < shape.window; ++t) {
        for (std::size_t j = 0; j < shape.continuous; ++j) w(t, j) = u(gen);
        for (std::size_t j = 0; j < shape.discrete; ++j)
            w(t, shape.continuous + j) = static_cast<double>(gen() % shape.cardinalities[j]);
    }
    return w;
}

} // namespace

static void BM_Forward(benchmark::State& state) {
    const auto shape = bench_shape(static_cast<std::size_t>(state.range(0)));
    const auto model = ForecastModel::initialize(shape, 1);
    const auto window = bench_window(shape);
    for (auto _ : state) benchmark::DoNotOptimize(forward(model, window));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(256);

static void BM_Gradients(benchmark::State& state) {
    const auto shape = bench_shape(static_cast<std::size_t>(state.range(0)));
    const auto model = ForecastModel::initialize(shape, 1);
    const auto window = bench_window(shape);
    const std::vector<double> target = {0.5, 0.5, 0.5, 1.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(gradients(model, window, target, 1.0));
}
BENCHMARK(BM_Gradients)->Arg(32)->Arg(256);

static void BM_Decompose(benchmark::State& state) {
    const auto shape = bench_shape(32);
    const auto window = bench_window(shape);
    for (auto _ : state) benchmark::DoNotOptimize(decompose(window, 3));
}
BENCHMARK(BM_Decompose);

BENCHMARK_MAIN();
