#include <benchmark/benchmark.h>

#include "multicolor/model.hpp"
#include "multicolor/trainer.hpp"

using namespace multicolor;

static void BM_GeneratorForward(benchmark::State& state) {
    torch::manual_seed(0);
    auto cfg = ModelConfig::desk();
    MultiColorNet net(cfg);
    net->eval();
    torch::NoGradGuard no_grad;
    const auto gray = torch::rand({state.range(0), 1, cfg.encoder.height, cfg.encoder.width});
    for (auto _ : state) benchmark::DoNotOptimize(net->forward(gray).rgb.data_ptr());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratorForward)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_CscForward(benchmark::State& state) {
    torch::manual_seed(0);
    CscNet csc(CscConfig{});
    torch::NoGradGuard no_grad;
    const auto gray = torch::rand({4, 1, 64, 64});
    std::vector<torch::Tensor> pairs(3, torch::rand({4, 2, 64, 64}));
    for (auto _ : state) benchmark::DoNotOptimize(csc->forward(gray, pairs).data_ptr());
}
BENCHMARK(BM_CscForward)->Unit(benchmark::kMillisecond);

static void BM_TrainStep(benchmark::State& state) {
    auto cfg = RunConfig::desk();
    cfg.train.batch_size = 4;
    Trainer trainer(cfg);
    std::vector<Sample> samples;
    for (int i = 0; i < 4; ++i) {
        samples.push_back(make_sample(synthesize_scene(100 + i, 64, 64), 64, 64, cfg.model.spaces));
    }
    const auto batch = make_batch(samples, cfg.model.spaces);
    for (auto _ : state) benchmark::DoNotOptimize(trainer.step(batch).total);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond)->Iterations(5);

BENCHMARK_MAIN();
