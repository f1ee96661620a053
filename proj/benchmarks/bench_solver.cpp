// Wall-clock benchmarks for the hot paths: full outer-loop runs on the
// registry problems, single subproblem solves, the operator-norm power
// iteration, and a pair of proximal operators. Build with -DCMAKE_BUILD_TYPE
// =Release; the numbers are meaningless otherwise.

#include <benchmark/benchmark.h>

#include <string>

#include "cgn/convex.hpp"
#include "cgn/registry.hpp"
#include "cgn/rng.hpp"
#include "cgn/solver.hpp"
#include "cgn/subproblem.hpp"

namespace {

using cgn::Matrix;
using cgn::Vector;

void full_run(benchmark::State& state, const std::string& name) {
    const auto* entry = cgn::find_problem(name);
    auto built = entry->build({});
    for (auto _ : state) {
        auto out = cgn::run(built.problem, built.x0, entry->default_config);
        benchmark::DoNotOptimize(out.final_objective);
    }
    state.SetLabel(name);
}

void subproblem_solve(benchmark::State& state, const std::string& name, double mu) {
    const auto* entry = cgn::find_problem(name);
    auto built = entry->build({});
    const cgn::InnerConfig cfg;
    for (auto _ : state) {
        auto sol = cgn::solve_subproblem(built.problem, built.x0, mu, cfg);
        benchmark::DoNotOptimize(sol.value);
    }
    state.SetLabel(name);
}

void operator_norm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    cgn::SplitMix64 rng(11);
    Matrix J(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) J(i, j) = cgn::gaussian(rng);
    for (auto _ : state) benchmark::DoNotOptimize(cgn::operator_norm_estimate(J));
}

void prox_l1(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto g = cgn::outer::l1_norm(n);
    cgn::SplitMix64 rng(12);
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = cgn::gaussian(rng);
    for (auto _ : state) benchmark::DoNotOptimize(g.prox(z, 0.7));
}

void prox_linf(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    auto g = cgn::outer::linf_norm(n);
    cgn::SplitMix64 rng(13);
    Vector z(n);
    for (int i = 0; i < n; ++i) z[i] = cgn::gaussian(rng);
    for (auto _ : state) benchmark::DoNotOptimize(g.prox(z, 0.7));
}

}  // namespace

BENCHMARK_CAPTURE(full_run, rosenbrock, "rosenbrock-ls");
BENCHMARK_CAPTURE(full_run, l1_exp_fit, "l1-exp-fit");
BENCHMARK_CAPTURE(full_run, minimax, "minimax-quad");
BENCHMARK_CAPTURE(full_run, ball_ls, "ball-constrained-ls");

BENCHMARK_CAPTURE(subproblem_solve, rosenbrock_mu1, "rosenbrock-ls", 1.0);
BENCHMARK_CAPTURE(subproblem_solve, minimax_mu1, "minimax-quad", 1.0);
BENCHMARK_CAPTURE(subproblem_solve, ball_ls_mu01, "ball-constrained-ls", 0.1);

BENCHMARK(operator_norm)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(prox_l1)->Arg(16)->Arg(256);
BENCHMARK(prox_linf)->Arg(16)->Arg(256);

BENCHMARK_MAIN();
