#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ergo/abstraction.hpp"
#include "ergo/errors.hpp"
#include "ergo/game.hpp"
#include "ergo/matrix_game.hpp"
#include "ergo/solver.hpp"

namespace ergo {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Independent substream: one named generator per role, all derived from the
// trace seed, so adding a sampling site never perturbs the others.
inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

template <class S>
int sample_index(const std::vector<S>& weights, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += num_traits<S>::to_double(weights[i]);
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

}  // namespace detail

// Finitely-describable strategy families used by the oracles: a repeated
// action cycle, uniform randomization, or a stationary map on the abstract
// game's states.
template <class S>
struct Strategy {
    enum class Kind { CyclicSequence, UniformRandom, AbstractStationary };
    Kind kind = Kind::UniformRandom;
    std::vector<int> cycle;                      // own-action indices
    const AbstractGame<S>* abstract = nullptr;   // referenced, not owned
    std::vector<std::vector<S>> mixed;           // [abstract state][own action]

    static Strategy cyclic(std::vector<int> actions) {
        if (actions.empty()) throw DomainError("cyclic strategy needs a nonempty cycle");
        Strategy s;
        s.kind = Kind::CyclicSequence;
        s.cycle = std::move(actions);
        return s;
    }
    static Strategy uniform() { return Strategy{}; }
    static Strategy stationary(const AbstractGame<S>& g, std::vector<std::vector<S>> mixed_actions) {
        if (mixed_actions.size() != g.num_states())
            throw ShapeError("stationary strategy must cover every abstract state");
        Strategy s;
        s.kind = Kind::AbstractStationary;
        s.abstract = &g;
        s.mixed = std::move(mixed_actions);
        return s;
    }
};

template <class S>
struct PlayTrace {
    std::uint64_t seed = 0;
    std::string rng_name;
    ActionSequence history;          // flattened pairs, one per stage
    std::vector<int> state_seq;      // realized states, length = stages + 1
    std::vector<S> rewards;          // one per stage
    std::vector<Belief<S>> beliefs;  // b_1 .. b_{stages+1}
};

// Samples one play of the blind game under the two strategies. Reproducible:
// the same seed yields the same trace, and each sampling role draws from its
// own named substream.
template <class S>
PlayTrace<S> simulate(const BlindGame<S>& game, const Belief<S>& b1, const Strategy<S>& strat1,
                      const Strategy<S>& strat2, long long horizon, std::uint64_t seed) {
    validate_belief(b1);
    if (b1.size() != game.num_states()) throw ShapeError("initial belief dimension mismatch");
    if (horizon < 0) throw DomainError("horizon must be nonnegative");

    auto rng_states = detail::substream(seed, 0);
    auto rng_p1 = detail::substream(seed, 1);
    auto rng_p2 = detail::substream(seed, 2);

    PlayTrace<S> trace;
    trace.seed = seed;
    trace.rng_name = "mt19937_64/splitmix64-streams";
    trace.state_seq.push_back(detail::sample_index(b1.w, rng_states));
    trace.beliefs.push_back(b1);

    int cursor1 = 0, cursor2 = 0;  // abstract-state cursors for stationary strategies

    auto pick = [&](const Strategy<S>& s, int own_count, int cursor, std::mt19937_64& rng,
                    long long stage) -> int {
        switch (s.kind) {
            case Strategy<S>::Kind::CyclicSequence:
                return s.cycle[static_cast<std::size_t>(stage % static_cast<long long>(s.cycle.size()))];
            case Strategy<S>::Kind::UniformRandom: {
                std::vector<S> u(static_cast<std::size_t>(own_count), S(1) / S(own_count));
                return detail::sample_index(u, rng);
            }
            case Strategy<S>::Kind::AbstractStationary:
                return detail::sample_index(s.mixed[static_cast<std::size_t>(cursor)], rng);
        }
        throw Error("internal: unknown strategy kind");
    };

    for (long long m = 0; m < horizon; ++m) {
        int i = pick(strat1, game.num_actions1(), cursor1, rng_p1, m);
        int j = pick(strat2, game.num_actions2(), cursor2, rng_p2, m);
        if (i < 0 || i >= game.num_actions1() || j < 0 || j >= game.num_actions2())
            throw UnknownActionError("strategy produced an out-of-range action");
        int pair = game.pair_index(i, j);
        int state = trace.state_seq.back();

        trace.history.push_back(pair);
        trace.rewards.push_back(game.reward(pair)[static_cast<std::size_t>(state)]);
        trace.beliefs.push_back(belief_step(game, trace.beliefs.back(), pair));

        std::vector<S> row(static_cast<std::size_t>(game.num_states()));
        for (int c = 0; c < game.num_states(); ++c) row[static_cast<std::size_t>(c)] = game.transition(pair).at(state, c);
        trace.state_seq.push_back(detail::sample_index(row, rng_states));

        if (strat1.kind == Strategy<S>::Kind::AbstractStationary)
            cursor1 = strat1.abstract->succ[static_cast<std::size_t>(cursor1)][static_cast<std::size_t>(pair)];
        if (strat2.kind == Strategy<S>::Kind::AbstractStationary)
            cursor2 = strat2.abstract->succ[static_cast<std::size_t>(cursor2)][static_cast<std::size_t>(pair)];
    }
    return trace;
}

// Exact N-stage value of the blind game by backward induction over the full
// history tree: at each belief, a one-shot matrix game of stage reward plus
// continuation value. Exponential in N; guarded by the product budget.
template <class S>
S brute_force_value_N(const BlindGame<S>& game, const Belief<S>& b1, long long N,
                      const SearchBudget& budget = {}) {
    if (N < 1) throw DomainError("brute force horizon must be >= 1");
    double nodes = std::pow(static_cast<double>(game.num_pairs()), static_cast<double>(N));
    if (nodes > static_cast<double>(budget.max_products))
        throw BudgetExceededError("history tree of size |A|^N exceeds the budget");

    struct Rec {
        const BlindGame<S>& g;
        S run(const Belief<S>& b, long long t) {
            if (t == 0) return S(0);
            Matrix<S> m(g.num_actions1(), g.num_actions2());
            for (int i = 0; i < g.num_actions1(); ++i) {
                for (int j = 0; j < g.num_actions2(); ++j) {
                    int a = g.pair_index(i, j);
                    m.at(i, j) = stage_reward(g, b, a) + run(belief_step(g, b, a), t - 1);
                }
            }
            if (g.num_actions2() == 1) {
                S best = m.at(0, 0);
                for (int i = 1; i < g.num_actions1(); ++i) best = std::max(best, m.at(i, 0));
                return best;
            }
            if (g.num_actions1() == 1) {
                S best = m.at(0, 0);
                for (int j = 1; j < g.num_actions2(); ++j) best = std::min(best, m.at(0, j));
                return best;
            }
            return matrix_game_value(m).value;
        }
    } rec{game};
    return rec.run(b1, N) / S(N);
}

template <class S>
struct CouplingReport {
    S max_deviation{};          // max L1 gap over all walked stages
    S max_deviation_first_block{};  // stages strictly inside the first block
    bool exhaustive = false;
    std::uint64_t walks = 0;
};

// Walks the true belief dynamics and the abstract dynamics along identical
// action sequences of length L and reports the largest L1 gap between the
// belief and the projection of the abstract state. Exhaustive when |A|^L
// fits the sample budget, otherwise that many random walks.
template <class S>
CouplingReport<S> coupling_check(const BlindGame<S>& game, const Belief<S>& b1, const S& eps,
                                 const ErgodicityCertificate<S>& cert, long long L,
                                 std::uint64_t sample_budget = 1u << 16, std::uint64_t seed = 0,
                                 const SearchBudget& budget = {}) {
    if (!cert.ergodic()) throw NotErgodicError("coupling check needs an ergodic game", cert.counterexample);
    AbstractGame<S> abstract = build_abstract_game(game, b1, eps, cert, budget);
    const long long n = abstract.n_eps;

    CouplingReport<S> report;
    auto observe = [&](const Belief<S>& b, int x, long long depth) {
        S dev = l1_distance(b, abstract.projections[static_cast<std::size_t>(x)]);
        if (dev > report.max_deviation) report.max_deviation = dev;
        if (depth <= n - 1 && dev > report.max_deviation_first_block)
            report.max_deviation_first_block = dev;
    };

    double total = std::pow(static_cast<double>(game.num_pairs()), static_cast<double>(L));
    if (total <= static_cast<double>(sample_budget)) {
        report.exhaustive = true;
        struct Walk {
            const BlindGame<S>& g;
            const AbstractGame<S>& abs;
            long long L;
            decltype(observe)& look;
            std::uint64_t count = 0;
            void run(const Belief<S>& b, int x, long long depth) {
                look(b, x, depth);
                if (depth == L) {
                    ++count;
                    return;
                }
                for (int a = 0; a < g.num_pairs(); ++a)
                    run(belief_step(g, b, a), abs.succ[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)],
                        depth + 1);
            }
        } walk{game, abstract, L, observe};
        walk.run(b1, 0, 0);
        report.walks = walk.count;
    } else {
        auto rng = detail::substream(seed, 42);
        std::uniform_int_distribution<int> pick(0, game.num_pairs() - 1);
        for (std::uint64_t w = 0; w < sample_budget; ++w) {
            Belief<S> b = b1;
            int x = 0;
            observe(b, x, 0);
            for (long long depth = 1; depth <= L; ++depth) {
                int a = pick(rng);
                b = belief_step(game, b, a);
                x = abstract.succ[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)];
                observe(b, x, depth);
            }
        }
        report.walks = sample_budget;
    }
    return report;
}

// |exact N-stage value - abstract N-stage value| at the root.
template <class S>
S payoff_gap_check(const BlindGame<S>& game, const Belief<S>& b1, const S& eps,
                   const ErgodicityCertificate<S>& cert, long long N, const SearchBudget& budget = {}) {
    S exact = brute_force_value_N(game, b1, N, budget);
    AbstractGame<S> abstract = build_abstract_game(game, b1, eps, cert, budget);
    S approx = shapley_iterate(abstract, N).root_value;
    S gap = exact - approx;
    return gap < S(0) ? -gap : gap;
}

}  // namespace ergo
