// Serial point sweep vs OpenMP column-line red-black sweep on the prototype problem.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "signorini/elliptic.hpp"
#include "signorini/problems.hpp"

using namespace signorini;

static void solve_prototype(benchmark::State& state, Sweep sweep) {
    ProblemParams pp;
    pp.grid.n = static_cast<int>(state.range(0));
    pp.grid.nx = static_cast<int>(state.range(1));
    pp.grid.ny = (pp.grid.nx - 1) / 2 + 1;
    const auto problem = make_elliptic_problem(pp);
    SolverParams sp;
    sp.sweep = sweep;
    int iters = 0;
    double res = 0.0;
    for (auto _ : state) {
        auto sol = solve_pgs(problem, sp);
        iters = sol.iters;
        res = std::max(sol.pde_residual, sol.comp_residual);
        benchmark::DoNotOptimize(sol.v.values.data());
    }
    state.counters["iters"] = iters;
    state.counters["residual"] = res;
    state.counters["threads"] = omp_get_max_threads();
}

static void BM_PointLexicographic(benchmark::State& s) { solve_prototype(s, Sweep::PointLexicographic); }
static void BM_LineRedBlack(benchmark::State& s) { solve_prototype(s, Sweep::LineRedBlack); }

BENCHMARK(BM_PointLexicographic)->Args({1, 65})->Args({1, 129})->Args({2, 33})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LineRedBlack)->Args({1, 65})->Args({1, 129})->Args({2, 33})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
