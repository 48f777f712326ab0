#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cmfg/fp.hpp"
#include "cmfg/hjb.hpp"
#include "cmfg/riesz.hpp"
#include "cmfg/solver.hpp"

using namespace cmfg;

namespace {

ScalarField random_field(const GridSpec& g, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-scale, scale);
    ScalarField f(g);
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = u(rng);
    return f;
}

// state.range(0) = dimension, state.range(1) = cells per side
GridSpec grid_of(const benchmark::State& state) {
    return GridSpec(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
}

}  // namespace

static void BM_RieszAssemble(benchmark::State& state) {
    const GridSpec g = grid_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(RieszOperator(g, 0.5));
}
BENCHMARK(BM_RieszAssemble)->Args({1, 256})->Args({1, 1024})->Args({2, 32})->Unit(benchmark::kMillisecond);

static void BM_RieszApply(benchmark::State& state) {
    const GridSpec g = grid_of(state);
    const RieszOperator k(g, 0.5);
    const ScalarField f = random_field(g, 1, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(apply(k, f));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.num_cells() * g.num_cells()));
}
BENCHMARK(BM_RieszApply)->Args({1, 256})->Args({1, 1024})->Args({2, 32})->Args({2, 64});

static void BM_SolveHjb(benchmark::State& state) {
    const GridSpec g = grid_of(state);
    const MFGParams p = MFGParams::make(g.dimension(), 2.0, 1.0, 0.0, 0.5);
    const ScalarField f = random_field(g, 2, 1.0);
    for (auto _ : state) {
        const HJBSolution s = solve_hjb(f, p);
        if (!s.converged) state.SkipWithError(s.message.c_str());
        benchmark::DoNotOptimize(s.lambda);
    }
}
BENCHMARK(BM_SolveHjb)->Args({1, 256})->Args({1, 1024})->Args({2, 32})->Args({2, 64})->Unit(benchmark::kMillisecond);

static void BM_SolveFp(benchmark::State& state) {
    // gradient of 0.8 sin(2 pi x) + x^2 along every axis; white noise per face
    // would put the residual at the rounding floor on fine grids
    const GridSpec g = grid_of(state);
    const int n = g.cells_per_axis();
    VectorField b(g);
    for (int d = 0; d < g.dimension(); ++d) {
        auto comp = b.component(d);
        for (std::size_t f = 0; f < comp.size(); ++f) {
            const double x = static_cast<double>(d == 0 ? f % (n + 1) : f / n) / n;
            comp[f] = 1.6 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * x) + 2.0 * x;
        }
    }
    b.zero_boundary_faces();
    for (auto _ : state) benchmark::DoNotOptimize(solve_fp(b, g).residual);
}
BENCHMARK(BM_SolveFp)->Args({1, 256})->Args({1, 1024})->Args({2, 32})->Args({2, 64})->Unit(benchmark::kMillisecond);

static void BM_SolveMfg(benchmark::State& state) {
    const GridSpec g = grid_of(state);
    const MFGParams p = MFGParams::make(g.dimension(), 2.0, 1.0, 0.1, 0.5);
    const RieszOperator k(g, p.alpha);
    const SolveConfig config;
    for (auto _ : state) {
        const MFGSolution s = solve_mfg(p, config, k);
        if (!s.converged) state.SkipWithError(s.message.c_str());
        state.counters["outer_iterations"] = s.iterations;
    }
}
BENCHMARK(BM_SolveMfg)->Args({1, 128})->Args({1, 256})->Args({2, 16})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
