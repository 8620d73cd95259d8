// Serial vs OpenMP timings for the two parallel hot paths: the minibatch
// gradient of the reference BiLSTM and the per-geography SARIMA order search.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "burstcast/baselines/sarima.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/network.hpp"
#include "burstcast/nn/params.hpp"

using namespace burstcast;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_BatchGradient(benchmark::State& state) {
    const auto spec = nn::ModelSpec::reference(nn::Variant::bilstm, 30, 16);
    const nn::Network net(spec);
    const auto params = nn::init_params(spec, 1);
    const std::size_t B = 32, sample = spec.lookback * spec.input_width;
    Rng rng(2);
    std::vector<double> inputs(B * sample), targets(B);
    for (auto& v : inputs) v = rng.uniform(-1, 1);
    for (auto& v : targets) v = rng.uniform(-1, 1);
    std::vector<std::size_t> batch(B);
    for (std::size_t i = 0; i < B; ++i) batch[i] = i;
    const nn::SampleView view{inputs.data(), sample, targets};
    for (auto _ : state)
        benchmark::DoNotOptimize(nn::batch_loss_gradient(net, params.values, view, batch, 7, exec_of(state)));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * B));
}

void BM_SarimaPanel(benchmark::State& state) {
    std::vector<std::vector<double>> series(12);
    Rng rng(3);
    for (std::size_t g = 0; g < series.size(); ++g) {
        double prev = 0;
        for (std::size_t t = 0; t < 400; ++t) {
            prev = 0.5 * prev + rng.uniform(-1, 1) + std::sin(0.12 * static_cast<double>(t + g));
            series[g].push_back(prev);
        }
    }
    const auto grid = baselines::default_grid();
    for (auto _ : state) benchmark::DoNotOptimize(baselines::fit_sarima_panel(series, grid, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_BatchGradient)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SarimaPanel)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
