#include <benchmark/benchmark.h>

#include "multicolor/colorspace.hpp"
#include "multicolor/data.hpp"

using namespace multicolor;

static void BM_RoundTrip(benchmark::State& state) {
    const auto space = static_cast<ColorSpace>(state.range(0));
    const auto img = synthesize_scene(1, 64, 64);
    for (auto _ : state) {
        auto back = space_to_rgb(rgb_to_space(img, space));
        benchmark::DoNotOptimize(back.image.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.pixel_count()));
    state.SetLabel(std::string(to_string(space)));
}
BENCHMARK(BM_RoundTrip)->DenseRange(0, 2);

static void BM_ExtractChannels(benchmark::State& state) {
    const auto img = synthesize_scene(2, 64, 64);
    for (auto _ : state) {
        for (auto space : kAllColorSpaces) benchmark::DoNotOptimize(extract_color_channels(img, space).channels.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.pixel_count()) * 3);
}
BENCHMARK(BM_ExtractChannels);

static void BM_GamutSlice(benchmark::State& state) {
    const auto space = static_cast<ColorSpace>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gamut_slice(0.4, space, 128).in_gamut_count());
    state.SetLabel(std::string(to_string(space)));
}
BENCHMARK(BM_GamutSlice)->DenseRange(0, 2);

BENCHMARK_MAIN();
