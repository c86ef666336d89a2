#include <doctest.h>

#include "ergo/ergodicity.hpp"
#include "ergo/oracles.hpp"
#include "ergo/pfa.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace ergo;
using namespace ergo_test;

TEST_SUITE_BEGIN("pfa-reduction");

TEST_CASE("acceptance probability of the empty word is the initial indicator") {
    auto pfa = half_then_three_quarters<Rational>();
    pfa.accepting = {0, 1};
    CHECK(acceptance_probability(pfa, {}) == 0);
    pfa.accepting = {1, 0};
    CHECK(acceptance_probability(pfa, {}) == 1);
}

TEST_CASE("acceptance after a and aa") {
    auto pfa = half_then_three_quarters<Rational>();
    CHECK(acceptance_probability(pfa, {0}) == Rational(1, 2));
    CHECK(acceptance_probability(pfa, {0, 0}) == Rational(3, 4));
    CHECK_THROWS_AS(acceptance_probability(pfa, {3}), UnknownSymbolError);
}

TEST_CASE("reduction adds one state and one action") {
    auto pfa = half_then_three_quarters<Rational>();
    auto red = reduce_to_blind_mdp(pfa, Rational(1, 2));
    CHECK(red.game.num_states() == 3);
    CHECK(red.game.num_actions1() == 2);
    CHECK(red.game.num_actions2() == 1);
    CHECK(red.initial_belief == Belief<Rational>::dirac(0, 3));
    CHECK_NOTHROW(validate_game(red.game));
}

TEST_CASE("every reduced transition matrix is Markov") {
    Rng rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        auto pfa = random_pfa<Rational>(3, 2, rng);
        auto red = reduce_to_blind_mdp(pfa, Rational(3, 10));
        for (int a = 0; a < red.game.num_pairs(); ++a)
            CHECK(is_markov_pattern(pattern_of(red.game.transition(a))));
    }
}

TEST_CASE("reduced sink row is absorbing under symbols; Restart recalls to the start") {
    auto pfa = half_then_three_quarters<Rational>();
    auto red = reduce_to_blind_mdp(pfa, Rational(1, 4));
    const auto& g = red.game;
    int sink = red.sink_state;
    int restart = red.restart_action;
    for (int c = 0; c < g.num_states(); ++c)
        CHECK(g.transition(0).at(sink, c) == (c == sink ? Rational(1) : Rational(0)));
    for (int r = 0; r < g.num_states(); ++r)
        for (int c = 0; c < g.num_states(); ++c)
            CHECK(g.transition(restart).at(r, c) == (c == 0 ? Rational(1) : Rational(0)));
    // Sink column carries theta off every original state under symbols.
    for (int r = 0; r < pfa.num_states(); ++r) CHECK(g.transition(0).at(r, sink) == Rational(1, 4));
    // Symbol rewards are flat 1/2; Restart pays the acceptance indicator.
    for (int r = 0; r < g.num_states(); ++r) CHECK(g.reward(0)[static_cast<std::size_t>(r)] == Rational(1, 2));
    CHECK(g.reward(restart)[0] == Rational(0));
    CHECK(g.reward(restart)[1] == Rational(1));
    CHECK(g.reward(restart)[static_cast<std::size_t>(sink)] == Rational(1, 2));
}

TEST_CASE("block payoff: acceptance exactly 1/2 averages to exactly 1/2") {
    auto pfa = half_then_three_quarters<Rational>();
    for (const char* theta : {"1/10", "1/2", "99/100"})
        CHECK(cyclic_block_payoff(pfa, scalar_from_string<Rational>(theta), {0}) == Rational(1, 2));
}

TEST_CASE("block payoff worked example: N = 1, theta = 1/2, acceptance 1") {
    Pfa<Rational> pfa;
    pfa.states = {"s1", "s2"};
    pfa.symbols = {"a"};
    pfa.transitions = {mat<Rational>({{"0", "1"}, {"0", "1"}})};
    pfa.accepting = {0, 1};
    pfa.initial = 0;
    CHECK(acceptance_probability(pfa, {0}) == 1);
    CHECK(cyclic_block_payoff(pfa, Rational(1, 2), {0}) == Rational(5, 8));
}

TEST_CASE("block payoff excess is (1-theta)^N (acc - 1/2) / (N+1), exactly") {
    Rng rng(62);
    for (int trial = 0; trial < 40; ++trial) {
        auto pfa = random_pfa<Rational>(3, 2, rng);
        std::uniform_int_distribution<int> len(1, 4), sym(0, 1), th(1, 9);
        Word w;
        for (int i = len(rng); i > 0; --i) w.push_back(sym(rng));
        Rational theta(th(rng), 10);
        Rational acc = acceptance_probability(pfa, w);
        Rational lhs = cyclic_block_payoff(pfa, theta, w) - Rational(1, 2);
        Rational rhs = pow_int(Rational(1) - theta, static_cast<long long>(w.size())) *
                       (acc - Rational(1, 2)) / Rational(static_cast<long long>(w.size()) + 1);
        CHECK(lhs == rhs);
        CHECK((cyclic_block_payoff(pfa, theta, w) > Rational(1, 2)) == (acc > Rational(1, 2)));
    }
    // As theta approaches 1 the payoff collapses to 1/2 regardless of acceptance.
    auto pfa = half_then_three_quarters<Rational>();
    Rational wide = cyclic_block_payoff(pfa, Rational(1, 2), {0, 0}) - Rational(1, 2);
    Rational narrow = cyclic_block_payoff(pfa, Rational(999, 1000), {0, 0}) - Rational(1, 2);
    CHECK(narrow > 0);
    CHECK(narrow < wide / Rational(1000));
}

TEST_CASE("theta outside (0,1) is rejected") {
    auto pfa = half_then_three_quarters<Rational>();
    CHECK_THROWS_AS(reduce_to_blind_mdp(pfa, Rational(0)), DomainError);
    CHECK_THROWS_AS(reduce_to_blind_mdp(pfa, Rational(1)), DomainError);
    CHECK_THROWS_AS(cyclic_block_payoff(pfa, Rational(1), {0}), DomainError);
}

TEST_CASE("reduced games verify ergodic with n0 = 1") {
    Rng rng(63);
    for (int trial = 0; trial < 10; ++trial) {
        auto pfa = random_pfa<Rational>(3, 2, rng);
        auto red = reduce_to_blind_mdp(pfa, Rational(1, 2));
        auto cert = verify_ergodic(red.game);
        REQUIRE(cert.ergodic());
        CHECK(cert.n0 == 1);
    }
}

TEST_CASE("word search returns the length-lexicographic first hit") {
    auto pfa = half_then_three_quarters<Rational>();
    auto word = exists_word_above_half(pfa, 5);
    REQUIRE(word.has_value());
    CHECK(*word == Word{0, 0});  // "a" only reaches exactly 1/2

    pfa.accepting = {1, 0};  // initial state accepting: the empty word wins
    auto empty = exists_word_above_half(pfa, 5);
    REQUIRE(empty.has_value());
    CHECK(empty->empty());

    pfa.accepting = {0, 0};
    CHECK_FALSE(exists_word_above_half(pfa, 6).has_value());
}

TEST_CASE("monte carlo block reward of the cyclic strategy matches the closed form") {
    // Double-precision game; the closed form is computed exactly and compared
    // through a 3-standard-error band.
    auto pfa_q = half_then_three_quarters<Rational>();
    Rational closed_q = cyclic_block_payoff(pfa_q, Rational(1, 2), {0, 0});

    auto pfa = half_then_three_quarters<double>();
    auto red = reduce_to_blind_mdp(pfa, 0.5);
    const int block = 3;  // word "aa" + Restart
    const int blocks = 20000;
    Strategy<double> cyclic = Strategy<double>::cyclic({0, 0, 1});
    Strategy<double> other = Strategy<double>::uniform();
    auto trace = simulate(red.game, red.initial_belief, cyclic, other, block * blocks, 7);

    double mean = 0, m2 = 0;
    for (int b = 0; b < blocks; ++b) {
        double sum = 0;
        for (int s = 0; s < block; ++s) sum += trace.rewards[static_cast<std::size_t>(b * block + s)];
        double x = sum / block;
        double delta = x - mean;
        mean += delta / (b + 1);
        m2 += delta * (x - mean);
    }
    double se = std::sqrt(m2 / (blocks - 1.0) / blocks);
    CHECK(std::abs(mean - to_double(closed_q)) <= 3 * se + 1e-12);
}

TEST_SUITE_END();
