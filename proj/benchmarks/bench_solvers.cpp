#include "platmatch/generators.hpp"
#include "platmatch/monopcomp.hpp"
#include "platmatch/mvpd.hpp"
#include "platmatch/properties.hpp"
#include "platmatch/solver.hpp"

#include <benchmark/benchmark.h>

using namespace platmatch;

namespace {

market_spec fixed_market(std::size_t firms, std::size_t individuals) {
    rng gen(1000 + firms * 10 + individuals);
    market_draw d;
    d.min_firms = d.max_firms = firms;
    d.min_individuals = d.max_individuals = individuals;
    return random_market(gen, d);
}

void bm_brute_force(benchmark::State& state) {
    auto m = fixed_market(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force(m, false).objective);
}
BENCHMARK(bm_brute_force)->Args({2, 2})->Args({3, 3})->Args({4, 4});

void bm_solve_threshold(benchmark::State& state) {
    auto m = fixed_market(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_threshold(m).objective);
}
BENCHMARK(bm_solve_threshold)->Args({2, 2})->Args({4, 4})->Args({6, 6});

void bm_solve_mvpd(benchmark::State& state) {
    rng gen(17);
    mvpd_draw d;
    d.min_channels = d.max_channels = static_cast<std::size_t>(state.range(0));
    auto s = random_mvpd(gen, d);
    for (auto _ : state) benchmark::DoNotOptimize(solve_mvpd(s).objective);
}
BENCHMARK(bm_solve_mvpd)->Arg(2)->Arg(3)->Arg(4);

void bm_solve_amazon(benchmark::State& state) {
    rng gen(23);
    amazon_draw d;
    d.min_firms = d.max_firms = static_cast<std::size_t>(state.range(0));
    auto s = random_amazon(gen, d);
    for (auto _ : state) benchmark::DoNotOptimize(solve_amazon(s).objective);
}
BENCHMARK(bm_solve_amazon)->Arg(4)->Arg(8)->Arg(12);

void bm_property_suite(benchmark::State& state) {
    property_options o;
    o.trials = 20;
    o.jobs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_suite("oracle", o).passed);
}
BENCHMARK(bm_property_suite)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
