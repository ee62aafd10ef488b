#include "ppp/ensembles.hpp"
#include "ppp/occupation.hpp"
#include "ppp/rigidity.hpp"

#include <benchmark/benchmark.h>

using namespace ppp;

namespace {

Exec mode(const benchmark::State& st) {
    return st.range(0) ? Exec::Parallel : Exec::Serial;
}

void label(benchmark::State& st) {
    st.SetLabel(st.range(0) ? "openmp" : "serial");
}

void BM_GridVariance(benchmark::State& st) {
    auto k = matrix_kernel(KernelName::bessel4, 1.0);
    auto f = taper_statistic(TaperFunction(1, 100), false);
    VarianceOptions opt;
    opt.exec = mode(st);
    for (auto _ : st) benchmark::DoNotOptimize(variance_additive(k, f, opt).variance);
    label(st);
}

void BM_CovarianceSeries(benchmark::State& st) {
    auto k = matrix_kernel(KernelName::sine4);
    for (auto _ : st) benchmark::DoNotOptimize(covariance_series(k, 1, 256, mode(st)).values.back());
    label(st);
}

void BM_EnsembleBatch(benchmark::State& st) {
    EnsembleSpec spec{1, Weight::Hermite, 0, 200, 3};
    for (auto _ : st) benchmark::DoNotOptimize(sample_batch(spec, 200, mode(st)).size());
    label(st);
}

void BM_SturmCounts(benchmark::State& st) {
    EnsembleSpec spec{4, Weight::Laguerre, 2, 200, 3};
    for (auto _ : st)
        benchmark::DoNotOptimize(sample_counts(spec, 5000, RescaleMode::hard_edge(200), 0, 2, mode(st)).size());
    label(st);
}

}  // namespace

BENCHMARK(BM_GridVariance)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CovarianceSeries)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleBatch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SturmCounts)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
