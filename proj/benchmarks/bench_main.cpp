#include <benchmark/benchmark.h>

#include "stegcost/cost.hpp"
#include "stegcost/embed.hpp"
#include "stegcost/eval.hpp"
#include "stegcost/oracle.hpp"
#include "stegcost/synth.hpp"

namespace {

using namespace stegcost;

GrayImage bench_cover(int size) { return synth_cover("noise:13", size, size, 42); }

void BM_FilterLogitFullScore(benchmark::State& state) {
    GrayImage img = bench_cover(static_cast<int>(state.range(0)));
    FilterLogitOracle oracle;
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle.score(img));
    }
}
BENCHMARK(BM_FilterLogitFullScore)->Arg(64)->Arg(256);

void BM_FilterLogitIncremental(benchmark::State& state) {
    GrayImage img = bench_cover(static_cast<int>(state.range(0)));
    FilterLogitOracle oracle;
    auto scorer = oracle.prepare(img);
    int i = img.height() / 2, j = img.width() / 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(scorer->score_with_pixel(i, j, 200));
    }
}
BENCHMARK(BM_FilterLogitIncremental)->Arg(64)->Arg(256);

void BM_LinearResidualIncremental(benchmark::State& state) {
    GrayImage img = bench_cover(static_cast<int>(state.range(0)));
    std::vector<double> w(14, 0.25);
    LinearResidualOracle oracle(w, -0.5);
    auto scorer = oracle.prepare(img);
    int i = img.height() / 2, j = img.width() / 2;
    for (auto _ : state) {
        benchmark::DoNotOptimize(scorer->score_with_pixel(i, j, 200));
    }
}
BENCHMARK(BM_LinearResidualIncremental)->Arg(64)->Arg(256);

void BM_BuildCostMap(benchmark::State& state) {
    GrayImage img = bench_cover(64);
    FilterLogitOracle oracle;
    int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_cost_map(oracle, img, k));
    }
    state.SetItemsProcessed(state.iterations() * img.width() * img.height());
}
BENCHMARK(BM_BuildCostMap)->Arg(1)->Arg(13);

void BM_HillCost(benchmark::State& state) {
    GrayImage img = bench_cover(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(hill_cost(img));
    }
}
BENCHMARK(BM_HillCost)->Arg(64)->Arg(256);

void BM_AverageFilter(benchmark::State& state) {
    SensitivityMap map(256, 256, 0.0);
    for (std::size_t i = 0; i < map.values.size(); ++i) {
        map.values[i] = static_cast<double>(i % 97) / 97.0;
    }
    int k = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(average_filter(map, k));
    }
}
BENCHMARK(BM_AverageFilter)->Arg(3)->Arg(13)->Arg(21);

void BM_SolveLambda(benchmark::State& state) {
    GrayImage img = bench_cover(64);
    CostMap map = hill_cost(img);
    PayloadSpec payload = PayloadSpec::from_alpha(0.4, 64, 64);
    Rule rule = state.range(0) == 0 ? Rule::gibbs : Rule::capped;
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_lambda(map, payload, rule));
    }
}
BENCHMARK(BM_SolveLambda)->Arg(0)->Arg(1);

void BM_SamplePattern(benchmark::State& state) {
    GrayImage img = bench_cover(256);
    CostMap map = hill_cost(img);
    PayloadSpec payload = PayloadSpec::from_alpha(0.4, 256, 256);
    LambdaSolution sol = solve_lambda(map, payload, Rule::capped);
    ChangeProbabilities probs = capped_probs(map, sol.lambda);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_pattern(probs, seed++));
    }
    state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_SamplePattern);

void BM_ExtractFeatures(benchmark::State& state) {
    GrayImage img = bench_cover(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(extract_features(img));
    }
}
BENCHMARK(BM_ExtractFeatures)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
