// Serial reference vs OpenMP kernels. Argument: grid size m (and observation
// count where relevant).

#include <benchmark/benchmark.h>

#include <vector>

#include "newton/asymptotics.hpp"
#include "newton/experiments.hpp"
#include "newton/grid_kernels.hpp"
#include "newton/recursion.hpp"

using namespace newton;

namespace {

struct Grid {
    GridDensity g;
    std::vector<double> w;
    SupportView view() const { return {g.nodes(), w, g.values()}; }
};

Grid make_grid(std::size_t m) {
    GridDensity g = normal_grid(1.0, 9.0, m);
    return {g, std::vector<double>(g.weights().begin(), g.weights().end())};
}

template <Backend B>
void BM_BayesStep(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto grid = make_grid(m);
    const Kernel k = Kernel::gaussian(1.0);
    std::vector<double> post(m);
    double x = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bayes_posterior(B, k, x, grid.view(), post));
        x = -x;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m));
}

template <Backend B>
void BM_SetProbabilities(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto grid = make_grid(m);
    const Kernel k = Kernel::gaussian(1.0);
    std::vector<double> coeffs;
    for (double t : {-1.0, 0.0, 1.0, 2.0, 3.0}) {
        const auto c = grid.g.set_coefficients(ThetaSet::at_most(t));
        coeffs.insert(coeffs.end(), c.begin(), c.end());
    }
    std::vector<double> xs;
    for (int i = 0; i < 2000; ++i) xs.push_back(-20.0 + 0.02 * i);
    std::vector<double> logf(xs.size()), probs(xs.size() * 5);
    for (auto _ : state) {
        set_probabilities(B, k, xs, grid.view(), coeffs, 5, logf, probs);
        benchmark::DoNotOptimize(probs.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * xs.size()));
}

template <Backend B>
void BM_Fit(benchmark::State& state) {
    const auto m = static_cast<std::size_t>(state.range(0));
    const auto n = static_cast<std::size_t>(state.range(1));
    const auto xs = fig2_data(n, 7);
    const auto s0 = EstimatorState::initial(Kernel::gaussian(1.0), WeightSchedule::polynomial(1.0, 1.0),
                                            normal_grid(1.0, 9.0, m), B);
    for (auto _ : state) benchmark::DoNotOptimize(fit(s0, xs).n);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m * n));
}

void BM_SumSerial(benchmark::State& state) {
    const std::vector<double> v(static_cast<std::size_t>(state.range(0)), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(serial::sum(v));
}

void BM_SumOmp(benchmark::State& state) {
    const std::vector<double> v(static_cast<std::size_t>(state.range(0)), 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(omp::sum(v));
}

}  // namespace

BENCHMARK(BM_BayesStep<Backend::serial>)->Arg(1001)->Arg(10001)->Arg(100001);
BENCHMARK(BM_BayesStep<Backend::openmp>)->Arg(1001)->Arg(10001)->Arg(100001);
BENCHMARK(BM_SetProbabilities<Backend::serial>)->Arg(1001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SetProbabilities<Backend::openmp>)->Arg(1001)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fit<Backend::serial>)->Args({1001, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Fit<Backend::openmp>)->Args({1001, 10000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SumSerial)->Arg(1 << 20);
BENCHMARK(BM_SumOmp)->Arg(1 << 20);

BENCHMARK_MAIN();
