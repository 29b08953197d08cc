#include <benchmark/benchmark.h>

#include <random>

#include "multicolor/data.hpp"
#include "multicolor/metrics.hpp"

using namespace multicolor;

static void BM_FrechetDistance(benchmark::State& state) {
    const auto dim = static_cast<std::size_t>(state.range(0));
    std::mt19937 rng(0);
    std::normal_distribution<double> d;
    std::vector<std::vector<double>> a(256, std::vector<double>(dim)), b(256, std::vector<double>(dim));
    for (auto& x : a) {
        for (double& v : x) v = d(rng);
    }
    for (auto& x : b) {
        for (double& v : x) v = 0.5 + d(rng);
    }
    for (auto _ : state) benchmark::DoNotOptimize(frechet_distance(a, b).distance);
}
BENCHMARK(BM_FrechetDistance)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Embed(benchmark::State& state) {
    FixedConvEmbedder embedder;
    const auto img = synthesize_scene(3, 64, 64);
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(img).data());
}
BENCHMARK(BM_Embed)->Unit(benchmark::kMillisecond);

static void BM_Psnr(benchmark::State& state) {
    const auto a = synthesize_scene(4, 256, 256);
    const auto b = synthesize_scene(5, 256, 256);
    for (auto _ : state) benchmark::DoNotOptimize(psnr(a, b));
}
BENCHMARK(BM_Psnr);

BENCHMARK_MAIN();
