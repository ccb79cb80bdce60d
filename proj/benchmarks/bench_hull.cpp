#include "proactive/spectral.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace proactive;

static void BM_HullMembership(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    Matrix points(n, 4);
    for (auto& v : points.data()) v = u(gen);
    const ConvexHull hull(points);
    std::vector<double> query(4);
    for (auto _ : state) {
        for (auto& v : query) v = u(gen);
        benchmark::DoNotOptimize(hull.contains(query));
    }
}
BENCHMARK(BM_HullMembership)->Arg(50)->Arg(500)->Arg(2000);

static void BM_Rdft(benchmark::State& state) {
    std::vector<double> segment(static_cast<std::size_t>(state.range(0)));
    std::mt19937_64 gen(3);
    std::normal_distribution<double> g;
    for (auto& v : segment) v = g(gen);
    for (auto _ : state) benchmark::DoNotOptimize(rdft(segment));
}
BENCHMARK(BM_Rdft)->Arg(6)->Arg(64);

BENCHMARK_MAIN();
