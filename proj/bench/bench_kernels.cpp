// Serial reference against OpenMP kernels on identical inputs.

#include <benchmark/benchmark.h>

#include "ubsde/brownian.hpp"
#include "ubsde/catalog.hpp"
#include "ubsde/picard.hpp"
#include "ubsde/regression.hpp"
#include "ubsde/weights.hpp"

using namespace ubsde;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(1) == 0 ? Execution::serial : Execution::parallel;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(1) == 0 ? "serial" : "parallel");
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleBrownian(benchmark::State& state) {
    const TimeGrid g = make_grid(1.0, 50);
    const auto paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_brownian(g, paths, 1, 1, mode(state)));
    }
    label(state);
}

void BM_WeightedNorm(benchmark::State& state) {
    const TimeGrid g = make_grid(1.0, 50);
    const auto paths = static_cast<std::size_t>(state.range(0));
    const auto e = sample_brownian(g, paths, 1, 1);
    const auto alpha = eval_alpha(Variant::A1, CoefficientProcess::abs_brownian(0.5),
                                  CoefficientProcess::constant(0.1), CoefficientProcess::constant(0.5),
                                  WeightParams(2, 4, 5, 2250), e);
    const WeightProcess w = eval_weight(alpha, g);
    for (auto _ : state) {
        benchmark::DoNotOptimize(weighted_m2_norm(e.values(), w, g, mode(state)));
    }
    label(state);
}

void BM_RegressionFit(benchmark::State& state) {
    const auto paths = static_cast<std::size_t>(state.range(0));
    const auto e = sample_brownian(make_grid(1.0, 2), paths, 1, 1);
    Eigen::MatrixXd x(paths, 1), y(paths, 2);
    for (std::size_t p = 0; p < paths; ++p) {
        x(p, 0) = e.w(p, 1);
        y(p, 0) = e.w(p, 2);
        y(p, 1) = e.w(p, 2) * e.w(p, 2);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(conditional_expectation(y, x, RegressionBasis::polynomial(3), mode(state)));
    }
    label(state);
}

void BM_DirectSolve(benchmark::State& state) {
    const auto paths = static_cast<std::size_t>(state.range(0));
    const auto e = sample_brownian(make_grid(1.0, 20), paths, 1, 1);
    const BoundModel model(make_catalog_model("bounded", {}), e);
    const RegressionPlan plan(e, RegressionBasis::polynomial(3), mode(state));
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_direct(model, plan));
    }
    label(state);
}

}  // namespace

BENCHMARK(BM_SampleBrownian)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedNorm)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegressionFit)->ArgsProduct({{10000, 100000}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectSolve)->ArgsProduct({{10000}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
