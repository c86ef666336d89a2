#include <benchmark/benchmark.h>

#include <random>

#include "ergo/abstraction.hpp"
#include "ergo/ergodicity.hpp"
#include "ergo/matrix_game.hpp"
#include "ergo/solver.hpp"

using namespace ergo;

namespace {

BlindGame<double> machine_game() {
    BlindGame<double> g;
    g.states = {"G", "F", "P"};
    g.actions1 = {"Wait", "Basic", "Critical"};
    g.actions2 = {"*"};
    auto fill = [](std::initializer_list<double> vals) {
        Matrix<double> m(3, 3);
        int i = 0;
        for (double v : vals) {
            m.at(i / 3, i % 3) = v;
            ++i;
        }
        return m;
    };
    g.transitions = {fill({0.9, 0.1, 0, 0, 0.7, 0.3, 0, 0.1, 0.9}),
                     fill({0.95, 0.05, 0, 0.8, 0.2, 0, 0, 0.3, 0.7}),
                     fill({1, 0, 0, 0.9, 0.1, 0, 0.3, 0.65, 0.05})};
    g.rewards = {{0.9, 0.55, 0.05}, {0.1, 0.7, 0.4}, {0.1, 0.5, 0.85}};
    return g;
}

Matrix<double> random_stochastic(int k, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp(1.0);
    Matrix<double> m(k, k);
    for (int r = 0; r < k; ++r) {
        double sum = 0;
        for (int c = 0; c < k; ++c) sum += (m.at(r, c) = exp(rng));
        for (int c = 0; c < k; ++c) m.at(r, c) /= sum;
    }
    return m;
}

void BM_Tau1(benchmark::State& state) {
    std::mt19937_64 rng(1);
    auto m = random_stochastic(static_cast<int>(state.range(0)), rng);
    for (auto _ : state) benchmark::DoNotOptimize(tau1(m));
}
BENCHMARK(BM_Tau1)->Arg(4)->Arg(16)->Arg(64);

void BM_PatternClosure(benchmark::State& state) {
    auto g = machine_game();
    for (auto _ : state) {
        auto cert = verify_ergodic(g);
        benchmark::DoNotOptimize(cert);
    }
}
BENCHMARK(BM_PatternClosure);

void BM_BuildAbstract(benchmark::State& state) {
    auto g = machine_game();
    auto cert = verify_ergodic(g);
    auto b1 = Belief<double>::uniform(3);
    double eps = state.range(0) / 100.0;
    for (auto _ : state) {
        auto abs = build_abstract_game(g, b1, eps, cert);
        benchmark::DoNotOptimize(abs.num_states());
    }
}
BENCHMARK(BM_BuildAbstract)->Arg(95)->Arg(90)->Arg(80);

void BM_ShapleySweep(benchmark::State& state) {
    auto g = machine_game();
    auto cert = verify_ergodic(g);
    auto abs = build_abstract_game(g, Belief<double>::uniform(3), 0.9, cert);
    for (auto _ : state) benchmark::DoNotOptimize(shapley_iterate(abs, state.range(0)).root_value);
}
BENCHMARK(BM_ShapleySweep)->Arg(64)->Arg(512);

void BM_MeanCycle(benchmark::State& state) {
    auto g = machine_game();
    auto cert = verify_ergodic(g);
    auto abs = build_abstract_game(g, Belief<double>::uniform(3), 0.9, cert);
    for (auto _ : state) benchmark::DoNotOptimize(mean_cycle_value(abs).at(0));
}
BENCHMARK(BM_MeanCycle);

void BM_MatrixGameSimplex(benchmark::State& state) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int n = static_cast<int>(state.range(0));
    Matrix<double> m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = unif(rng);
    for (auto _ : state) benchmark::DoNotOptimize(matrix_game_value(m).value);
}
BENCHMARK(BM_MatrixGameSimplex)->Arg(2)->Arg(6)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
