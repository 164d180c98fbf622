#include <benchmark/benchmark.h>

#include "amput/greens.hpp"
#include "amput/oracle.hpp"
#include "amput/pricer.hpp"
#include "amput/volterra.hpp"

using namespace amput;

namespace {

void BM_K1Closed(benchmark::State& st) {
    K1Args a{0.05, 0.6, 0.2, -0.3, 0.01, -0.02, 0.4};
    for (auto _ : st) benchmark::DoNotOptimize(K1_closed(a));
}
BENCHMARK(BM_K1Closed);

void BM_K1Fast(benchmark::State& st) {
    K1Args a{0.05, 0.6, 0.2, -0.3, 0.01, -0.02, 0.4};
    for (auto _ : st) benchmark::DoNotOptimize(K1_closed_fast(a));
}
BENCHMARK(BM_K1Fast);

void BM_IIntegrals(benchmark::State& st) {
    IArgs a{0.1, 0.8, -0.2, 0.01, 0.5, 0.0, 0.04, -0.15};
    for (auto _ : st) benchmark::DoNotOptimize(I_integrals(a));
}
BENCHMARK(BM_IIntegrals);

void BM_SolveBoundary(benchmark::State& st) {
    Model m(table1_params(60.0));
    SolverConfig cfg;
    cfg.M = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(solve_boundary(m, cfg));
}
BENCHMARK(BM_SolveBoundary)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_PriceQuery(benchmark::State& st) {
    Model m(table1_params(60.0));
    BoundarySolution sol = solve_boundary(m, SolverConfig{});
    PriceQuery q{0.0, {50.0, 55.0, 60.0, 65.0, 70.0, 80.0, 100.0}};
    for (auto _ : st) benchmark::DoNotOptimize(price_query(m, sol.bs, q));
}
BENCHMARK(BM_PriceQuery)->Unit(benchmark::kMillisecond);

void BM_FD(benchmark::State& st) {
    ParamSet p = table1_params(60.0);
    FDConfig cfg;
    cfg.Nx = static_cast<int>(st.range(0));
    cfg.Nt = cfg.Nx / 2;
    for (auto _ : st) benchmark::DoNotOptimize(fd_pide_american(cfg, p));
}
BENCHMARK(BM_FD)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_Tree(benchmark::State& st) {
    TreeConfig cfg{static_cast<int>(st.range(0)), 0.2, 0.1, 0.5, 1.0, 50.0};
    for (auto _ : st) benchmark::DoNotOptimize(tree_american(cfg, OptionType::put));
}
BENCHMARK(BM_Tree)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
