#include <doctest.h>

#include <set>

#include "ergo/abstraction.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace ergo;
using namespace ergo_test;

namespace {

const Rational kEps95(19, 20);  // equals tau_bar of the Table 1 game, so n_eps = 1

}  // namespace

TEST_SUITE_BEGIN("abstraction");

TEST_CASE("abstract belief set of a single-action ergodic game has at most two elements") {
    auto g = single_stable<Rational>();
    auto cert = verify_ergodic(g);
    REQUIRE(cert.ergodic());
    auto b1 = belief<Rational>({"1", "0"});
    auto set = abstract_belief_set(g, b1, Rational(1, 2), cert);
    CHECK(set.size() == 2);  // the stable row plus the distinct initial belief

    auto b_row = belief<Rational>({"1/4", "3/4"});
    CHECK(abstract_belief_set(g, b_row, Rational(1, 2), cert).size() == 1);  // they coincide
}

TEST_CASE("abstract belief set of the machine game at eps = tau_bar") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    Belief<Rational> b1 = Belief<Rational>::uniform(3);
    auto set = abstract_belief_set(g, b1, kEps95, cert);
    REQUIRE(set.size() == 4);
    std::set<std::vector<Rational>> seen;
    for (const auto& b : set) seen.insert(b.w);
    CHECK(seen.count(b1.w) == 1);
    CHECK(seen.count(vec<Rational>({"3/10", "3/10", "2/5"})) == 1);       // Wait column means
    CHECK(seen.count(vec<Rational>({"7/12", "11/60", "7/30"})) == 1);     // Basic
    CHECK(seen.count(vec<Rational>({"11/15", "1/4", "1/60"})) == 1);      // Critical
}

TEST_CASE("the non-root part of the abstract belief set is independent of b1") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    auto b1 = Belief<Rational>::uniform(3);
    auto b2 = Belief<Rational>::dirac(0, 3);
    auto s1 = abstract_belief_set(g, b1, kEps95, cert);
    auto s2 = abstract_belief_set(g, b2, kEps95, cert);
    std::set<std::vector<Rational>> set1, set2;
    for (const auto& b : s1)
        if (!(b == b1)) set1.insert(b.w);
    for (const auto& b : s2)
        if (!(b == b2)) set2.insert(b.w);
    CHECK(set1 == set2);
}

TEST_CASE("proj on root and prefix states") {
    auto g = machine_maintenance<Rational>();
    StableMatrixFamily<Rational> family(g, kEps95, 2);
    auto base = belief<Rational>({"1/2", "1/2", "0"});

    CHECK(proj(AbstractState<Rational>{base, {}}, family, g) == base);

    Belief<Rational> expected(row_times_matrix(base.w, g.transition(1)));
    CHECK(proj(AbstractState<Rational>{base, {1}}, family, g) == expected);

    auto uniform = Belief<Rational>::uniform(3);
    CHECK(proj(AbstractState<Rational>{uniform, {0}}, family, g) ==
          belief<Rational>({"3/10", "3/10", "2/5"}));
}

TEST_CASE("abstract update appends inside the block and jumps at its end") {
    auto g = machine_maintenance<Rational>();
    auto base = Belief<Rational>::uniform(3);

    StableMatrixFamily<Rational> family2(g, kEps95, 2);
    auto next = abstract_update(AbstractState<Rational>{base, {}}, 2, family2, g);
    CHECK(next.base == base);
    CHECK(next.prefix == ActionSequence{2});

    // Block length 1: every update jumps to the stable row, whatever the base.
    StableMatrixFamily<Rational> family1(g, kEps95, 1);
    auto from_uniform = abstract_update(AbstractState<Rational>{base, {}}, 0, family1, g);
    auto from_dirac = abstract_update(AbstractState<Rational>{Belief<Rational>::dirac(2, 3), {}}, 0, family1, g);
    CHECK(from_uniform.prefix.empty());
    CHECK(from_uniform.base == belief<Rational>({"3/10", "3/10", "2/5"}));
    CHECK(from_uniform.base == from_dirac.base);

    // Block length 2: the jump lands on the column means of P(a)P(a').
    auto mid = abstract_update(AbstractState<Rational>{base, {}}, 0, family2, g);
    auto jumped = abstract_update(mid, 0, family2, g);
    CHECK(jumped.prefix.empty());
    CHECK(jumped.base == Belief<Rational>(column_means(g.transition(0).multiply(g.transition(0)))));
}

TEST_CASE("family entries pair exact products with stable approximations") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    const Rational eps(4, 5);
    long long n = n_epsilon(g, cert, eps);
    StableMatrixFamily<Rational> family(g, eps, n);
    Rng rng(41);
    std::uniform_int_distribution<int> act(0, g.num_pairs() - 1);
    for (int trial = 0; trial < 20; ++trial) {
        ActionSequence seq;
        for (long long i = 0; i < n; ++i) seq.push_back(act(rng));
        auto [exact, stable] = family.entry(seq);
        CHECK(is_stable(stable));
        CHECK(is_row_stochastic(stable));
        CHECK(tau1(*exact) <= eps);
        // Row deviation bound: each row of T^n is within 2 tau1 <= 2 eps of
        // the column-mean row, in L1.
        Rational bound = Rational(2) * tau1(*exact);
        for (int r = 0; r < exact->rows(); ++r) {
            Rational dev(0);
            for (int c = 0; c < exact->cols(); ++c) {
                Rational d = exact->at(r, c) - stable.at(r, c);
                dev += d < 0 ? -d : d;
            }
            CHECK(dev <= bound);
            CHECK(dev <= Rational(2) * eps);
        }
    }
}

TEST_CASE("single-action ergodic game closes into at most two states") {
    auto g = single_stable<Rational>();
    auto cert = verify_ergodic(g);
    auto b1 = belief<Rational>({"1", "0"});
    auto abs = build_abstract_game(g, b1, Rational(1, 2), cert);
    REQUIRE(abs.n_eps == 1);
    REQUIRE(abs.num_states() == 2);
    // The stable row self-loops.
    CHECK(abs.succ[1][0] == 1);
    CHECK(abs.succ[0][0] == 1);
}

TEST_CASE("machine game at eps = tau_bar: root plus three stable rows") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    auto b1 = Belief<Rational>::uniform(3);
    auto abs = build_abstract_game(g, b1, kEps95, cert);
    REQUIRE(abs.n_eps == 1);
    CHECK(abs.num_states() == 4);
    CHECK(abs.beliefs.size() == 4);
    for (std::size_t x = 0; x < abs.num_states(); ++x) {
        CHECK(abs.succ[x].size() == 3);
        for (int a = 0; a < 3; ++a) {
            int to = abs.succ[x][static_cast<std::size_t>(a)];
            CHECK(to >= 1);  // jumps never return to the root belief here
            CHECK(to < 4);
        }
    }
    // Rewards at the root are the stage rewards at b1.
    for (int a = 0; a < 3; ++a) CHECK(abs.reward[0][static_cast<std::size_t>(a)] == stage_reward(g, b1, a));
}

TEST_CASE("closure is deterministic and total on random ergodic games") {
    Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_mixture_game<Rational>(3, 2, 1, rng, Rational(1, 2));
        auto cert = verify_ergodic(g);
        REQUIRE(cert.ergodic());
        auto b1 = random_grid_belief<Rational>(3, rng);
        auto abs = build_abstract_game(g, b1, Rational(3, 10), cert);
        for (std::size_t x = 0; x < abs.num_states(); ++x) {
            REQUIRE(abs.succ[x].size() == static_cast<std::size_t>(abs.num_pairs()));
            for (int a = 0; a < abs.num_pairs(); ++a) {
                int to = abs.succ[x][static_cast<std::size_t>(a)];
                CHECK(to >= 0);
                CHECK(static_cast<std::size_t>(to) < abs.num_states());
                CHECK(abs.reward[x][static_cast<std::size_t>(a)] >= 0);
                CHECK(abs.reward[x][static_cast<std::size_t>(a)] <= 1);
            }
        }
        // proj of a prefix state is the base pushed through the prefix.
        StableMatrixFamily<Rational> family(g, Rational(3, 10), abs.n_eps);
        for (std::size_t x = 0; x < abs.num_states(); ++x)
            CHECK(abs.projections[x] == proj(abs.states[x], family, g));
    }
}

TEST_CASE("abstract games from two roots agree off the root") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    const Rational eps(9, 10);  // n_eps = 3: prefix states exercise the block logic
    auto abs1 = build_abstract_game(g, Belief<Rational>::uniform(3), eps, cert);
    auto abs2 = build_abstract_game(g, Belief<Rational>::dirac(0, 3), eps, cert);

    using StateKey = std::pair<std::vector<Rational>, ActionSequence>;
    auto non_root_edges = [](const AbstractGame<Rational>& abs, const Belief<Rational>& root) {
        std::set<std::pair<StateKey, std::pair<int, StateKey>>> edges;
        for (std::size_t x = 0; x < abs.num_states(); ++x) {
            if (abs.states[x].base == root) continue;
            for (int a = 0; a < abs.num_pairs(); ++a) {
                const auto& to = abs.states[static_cast<std::size_t>(abs.succ[x][static_cast<std::size_t>(a)])];
                if (to.base == root) continue;
                edges.insert({{abs.states[x].base.w, abs.states[x].prefix}, {a, {to.base.w, to.prefix}}});
            }
        }
        return edges;
    };
    CHECK(non_root_edges(abs1, Belief<Rational>::uniform(3)) ==
          non_root_edges(abs2, Belief<Rational>::dirac(0, 3)));
}

TEST_CASE("float closure matches the exact closure on a clean corpus") {
    // Quantized float dedup (12 decimal digits) must not split or merge
    // states when the exact beliefs are well separated.
    Rng rng(43);
    for (int trial = 0; trial < 8; ++trial) {
        auto gq = random_mixture_game<Rational>(3, 2, 1, rng, Rational(1, 2));
        auto certq = verify_ergodic(gq);
        auto b1q = random_grid_belief<Rational>(3, rng);
        auto absq = build_abstract_game(gq, b1q, Rational(3, 10), certq);

        BlindGame<double> g;
        g.states = gq.states;
        g.actions1 = gq.actions1;
        g.actions2 = gq.actions2;
        for (const auto& t : gq.transitions) {
            Matrix<double> m(t.rows(), t.cols());
            for (int r = 0; r < t.rows(); ++r)
                for (int c = 0; c < t.cols(); ++c) m.at(r, c) = to_double(t.at(r, c));
            g.transitions.push_back(std::move(m));
        }
        for (const auto& rw : gq.rewards) {
            std::vector<double> v;
            for (const auto& x : rw) v.push_back(to_double(x));
            g.rewards.push_back(std::move(v));
        }
        Belief<double> b1;
        for (const auto& x : b1q.w) b1.w.push_back(to_double(x));
        auto cert = verify_ergodic(g);
        auto abs = build_abstract_game(g, b1, 0.3, cert);

        REQUIRE(cert.n0 == certq.n0);
        REQUIRE(abs.n_eps == absq.n_eps);
        CHECK(abs.num_states() == absq.num_states());
        CHECK(abs.beliefs.size() == absq.beliefs.size());
        CHECK(abs.succ == absq.succ);
    }
}

TEST_CASE("state budget failures are loud") {
    auto g = machine_maintenance<Rational>();
    auto cert = verify_ergodic(g);
    SearchBudget tiny;
    tiny.max_states = 2;
    CHECK_THROWS_AS(build_abstract_game(g, Belief<Rational>::uniform(3), kEps95, cert, tiny),
                    BudgetExceededError);
}

TEST_CASE("building from a non-ergodic certificate is refused") {
    auto g = swap_identity<Rational>();
    auto cert = verify_ergodic(g);
    CHECK_THROWS_AS(build_abstract_game(g, Belief<Rational>::uniform(2), Rational(1, 2), cert),
                    NotErgodicError);
}

TEST_SUITE_END();
