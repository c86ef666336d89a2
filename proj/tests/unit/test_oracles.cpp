#include <doctest.h>

#include "ergo/oracles.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/reference.hpp"

using namespace ergo;
using namespace ergo_test;

TEST_SUITE_BEGIN("oracles");

TEST_CASE("one-stage brute force is the matrix game of stage rewards") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_mixture_game<Rational>(2, 2, 2, rng, Rational(1, 2));
        Belief<Rational> b1 = random_grid_belief<Rational>(2, rng);
        Matrix<Rational> stage(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) stage.at(i, j) = stage_reward(g, b1, g.pair_index(i, j));
        CHECK(brute_force_value_N(g, b1, 1) == matrix_game_value(stage).value);
    }
}

TEST_CASE("constant rewards give a constant value at any horizon") {
    Rng rng(72);
    BlindGame<Rational> g;
    g.states = {"a", "b"};
    g.actions1 = {"x", "y"};
    g.actions2 = {"*"};
    g.transitions = {random_grid_matrix<Rational>(2, 4, rng), random_grid_matrix<Rational>(2, 4, rng)};
    g.rewards = {vec<Rational>({"3/7", "3/7"}), vec<Rational>({"3/7", "3/7"})};
    for (long long n : {1, 2, 4})
        CHECK(brute_force_value_N(g, Belief<Rational>::uniform(2), n) == Rational(3, 7));
}

TEST_CASE("machine game horizon-3 baseline matches the belief-tree induction") {
    auto g = machine_maintenance<Rational>();
    Belief<Rational> b1 = Belief<Rational>::uniform(3);
    Rational v3 = brute_force_value_N(g, b1, 3);
    CHECK(v3 == Rational(6053, 9000));  // frozen baseline
    CHECK(brute_force_value_N(g, b1, 1) == Rational(1, 2));
    CHECK(brute_force_value_N(g, b1, 2) == Rational(769, 1200));

    auto tree = belief_tree_game(g, b1, 3);
    CHECK(shapley_iterate(tree, 3).root_value == v3);
}

TEST_CASE("brute force respects the budget") {
    auto g = machine_maintenance<Rational>();
    SearchBudget tiny;
    tiny.max_products = 8;
    CHECK_THROWS_AS(brute_force_value_N(g, Belief<Rational>::uniform(3), 3, tiny), BudgetExceededError);
}

TEST_CASE("simulation of a deterministic chain is forced for any seed") {
    BlindGame<double> g;
    g.states = {"a", "b"};
    g.actions1 = {"x"};
    g.actions2 = {"*"};
    g.transitions = {mat<double>({{"0", "1"}, {"0", "1"}})};
    g.rewards = {vec<double>({"1/4", "3/4"})};
    for (std::uint64_t seed : {1ull, 99ull}) {
        auto trace = simulate(g, Belief<double>::dirac(0, 2), Strategy<double>::uniform(),
                              Strategy<double>::uniform(), 3, seed);
        CHECK(trace.state_seq == std::vector<int>{0, 1, 1, 1});
        CHECK(trace.rewards == std::vector<double>{0.25, 0.75, 0.75});
    }
}

TEST_CASE("identical seeds give identical traces") {
    auto g = machine_maintenance<double>();
    auto b1 = Belief<double>::uniform(3);
    auto s1 = Strategy<double>::uniform();
    auto s2 = Strategy<double>::uniform();
    auto t1 = simulate(g, b1, s1, s2, 64, 12345);
    auto t2 = simulate(g, b1, s1, s2, 64, 12345);
    CHECK(t1.history == t2.history);
    CHECK(t1.state_seq == t2.state_seq);
    CHECK(t1.rewards == t2.rewards);
    auto t3 = simulate(g, b1, s1, s2, 64, 54321);
    CHECK(t1.history != t3.history);  // overwhelmingly likely for 64 stages
}

TEST_CASE("trace beliefs replay belief_step along the history") {
    auto g = machine_maintenance<Rational>();
    auto b1 = Belief<Rational>::uniform(3);
    auto trace = simulate(g, b1, Strategy<Rational>::uniform(), Strategy<Rational>::uniform(), 12, 5);
    REQUIRE(trace.beliefs.size() == trace.history.size() + 1);
    REQUIRE(trace.state_seq.size() == trace.history.size() + 1);
    REQUIRE(trace.rewards.size() == trace.history.size());
    Belief<Rational> b = b1;
    for (std::size_t m = 0; m < trace.history.size(); ++m) {
        CHECK(trace.beliefs[m] == b);
        b = belief_step(g, b, trace.history[m]);
    }
    CHECK(trace.beliefs.back() == b);
    CHECK(trace.rng_name == "mt19937_64/splitmix64-streams");
}

TEST_CASE("abstract-stationary strategies replay the abstract game") {
    auto g = machine_maintenance<double>();
    auto cert = verify_ergodic(g);
    auto abs = build_abstract_game(g, Belief<double>::uniform(3), 0.95, cert);
    // Deterministically play Critical everywhere via a stationary map.
    std::vector<std::vector<double>> mixed(abs.num_states(), {0.0, 0.0, 1.0});
    auto strat = Strategy<double>::stationary(abs, mixed);
    auto trace = simulate(g, Belief<double>::uniform(3), strat, Strategy<double>::uniform(), 5, 3);
    for (int a : trace.history) CHECK(g.split_pair(a).first == 2);
}

TEST_CASE("coupling deviation is zero when every matrix is stable") {
    auto g = single_stable<Rational>();
    auto cert = verify_ergodic(g);
    auto report = coupling_check(g, Belief<Rational>::dirac(0, 2), Rational(1, 2), cert, 6);
    CHECK(report.exhaustive);
    CHECK(report.max_deviation == 0);
}

TEST_CASE("machine game coupling at eps = 0.95, walks of length 4") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    const Rational eps(19, 20);
    auto report = coupling_check(g, Belief<Rational>::uniform(3), eps, cert, 4);
    CHECK(report.exhaustive);
    CHECK(report.walks == 81);  // 3^4 full-length walks
    CHECK(report.max_deviation <= Rational(4) * eps);
    CHECK(report.max_deviation == Rational(477, 400));  // frozen measurement
    CHECK(report.max_deviation_first_block == 0);
}

TEST_CASE("sampled coupling stays under the bound too") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    const Rational eps(9, 10);
    auto report = coupling_check(g, Belief<Rational>::uniform(3), eps, cert, 12, /*sample_budget=*/64,
                                 /*seed=*/9);
    CHECK_FALSE(report.exhaustive);
    CHECK(report.max_deviation <= Rational(4) * eps);
    CHECK(report.max_deviation_first_block == 0);
}

TEST_CASE("payoff gap vanishes when the abstraction is lossless") {
    auto g = single_stable<Rational>();
    auto cert = verify_ergodic(g);
    CHECK(payoff_gap_check(g, Belief<Rational>::dirac(0, 2), Rational(1, 2), cert, 3) == 0);
}

TEST_CASE("payoff gap within 4 eps on random ergodic games") {
    Rng rng(73);
    for (int trial = 0; trial < 15; ++trial) {
        auto g = random_mixture_game<Rational>(2, 2, 1, rng, Rational(1, 2));
        auto cert = verify_ergodic(g);
        REQUIRE(cert.ergodic());
        const Rational eps(1, 5);
        Belief<Rational> b1 = random_grid_belief<Rational>(2, rng);
        CHECK(payoff_gap_check(g, b1, eps, cert, 4) <= Rational(4) * eps);
    }
}

TEST_CASE("coupling deviation does not grow when eps shrinks") {
    Rng rng(74);
    for (int trial = 0; trial < 8; ++trial) {
        auto g = random_mixture_game<Rational>(3, 2, 1, rng, Rational(1, 2));
        auto cert = verify_ergodic(g);
        Belief<Rational> b1 = random_grid_belief<Rational>(3, rng);
        auto strict = coupling_check(g, b1, Rational(1, 10), cert, 8, 1u << 14, 1);
        auto loose = coupling_check(g, b1, Rational(3, 10), cert, 8, 1u << 14, 1);
        CHECK(strict.max_deviation <= loose.max_deviation);
    }
}

TEST_SUITE_END();
