#include "gcl/gaussian.hpp"
#include "gcl/gsea.hpp"
#include "gcl/moments.hpp"
#include "gcl/rng.hpp"
#include "gcl/screening.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

using namespace gcl;

namespace {

screen::DataMatrix random_matrix(std::size_t p, std::size_t n) {
    std::vector<std::string> vars, samples;
    for (std::size_t i = 0; i < p; ++i) vars.push_back("v" + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) samples.push_back("s" + std::to_string(j));
    std::vector<double> values(p * n);
    for (std::size_t i = 0; i < p; ++i) {
        rng::Stream s(1, i);
        for (std::size_t j = 0; j < n; ++j) values[i * n + j] = s.normal();
    }
    return {vars, samples, values};
}

void summarize(benchmark::State& state, bool parallel) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 200);
    SummaryOptions options;
    options.bias_replicates = 1000;
    screen::summarize(m, options, parallel);
    for (auto _ : state) benchmark::DoNotOptimize(screen::summarize(m, options, parallel));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void permutation_null(benchmark::State& state, bool parallel) {
    const std::size_t n = 5000;
    std::vector<double> weights(n, 1.0);
    rng::Stream s(2, 0);
    std::vector<std::vector<std::uint32_t>> sets;
    for (int m = 0; m < 50; ++m) {
        std::vector<std::uint32_t> all(n);
        std::iota(all.begin(), all.end(), 0u);
        rng::shuffle(std::span<std::uint32_t>(all), s);
        all.resize(100);
        std::sort(all.begin(), all.end());
        sets.push_back(all);
    }
    const auto k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gsea::permutation_null(weights, sets, k, 3, parallel));
}

void order_statistic_table(benchmark::State& state, bool parallel) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(parallel ? gauss::OrderStatisticTable::compute(n, 3)
                                          : gauss::OrderStatisticTable::compute_serial(n, 3));
    }
}

void hl_bias(benchmark::State& state, bool parallel) {
    const int n = static_cast<int>(state.range(0));
    hl_weights(HlEstimator::Sample, n, 4);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_hl_bias(n, 2000, 4, HlEstimator::Sample, parallel));
}

}  // namespace

BENCHMARK_CAPTURE(summarize, serial, false)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(summarize, parallel, true)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(permutation_null, serial, false)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(permutation_null, parallel, true)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(order_statistic_table, serial, false)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(order_statistic_table, parallel, true)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(hl_bias, serial, false)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(hl_bias, parallel, true)->Arg(50)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
