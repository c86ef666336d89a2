#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/matrix.hpp"
#include "ergo/numeric.hpp"

namespace ergo {

// Action pairs (i, j) are flattened to a single alphabet A = I x J; a blind
// MDP is the |J| = 1 case. A sequence of flattened indices is what every
// product- and walk-enumerating routine consumes.
using ActionSequence = std::vector<int>;

template <class S>
struct Belief {
    std::vector<S> w;

    Belief() = default;
    explicit Belief(std::vector<S> weights) : w(std::move(weights)) {}

    int size() const { return static_cast<int>(w.size()); }

    static Belief dirac(int k, int n) {
        Belief b;
        b.w.assign(static_cast<std::size_t>(n), S(0));
        b.w.at(static_cast<std::size_t>(k)) = S(1);
        return b;
    }

    static Belief uniform(int n) {
        Belief b;
        b.w.assign(static_cast<std::size_t>(n), S(1) / S(n));
        return b;
    }

    bool operator==(const Belief& rhs) const { return w == rhs.w; }
    bool operator<(const Belief& rhs) const { return w < rhs.w; }
};

template <class S>
void validate_belief(const Belief<S>& b) {
    if (b.size() == 0) throw ShapeError("belief over empty state set");
    S sum(0);
    for (const S& x : b.w) {
        if (x < S(0)) throw NegativeEntryError("belief entry below zero");
        sum += x;
    }
    if (!num_traits<S>::belief_sum_ok(sum)) throw ValidationError("belief mass differs from 1");
}

template <class S>
S l1_distance(const Belief<S>& a, const Belief<S>& b) {
    if (a.size() != b.size()) throw ShapeError("belief dimension mismatch");
    S d(0);
    for (int k = 0; k < a.size(); ++k) {
        S diff = a.w[k] - b.w[k];
        d += diff < S(0) ? -diff : diff;
    }
    return d;
}

// In float mode beliefs are renormalized after every step so mass drift stays
// bounded by the documented tolerance; the exact mode preserves mass as-is.
template <class S>
void renormalize(Belief<S>& b) {
    if constexpr (!num_traits<S>::exact) {
        S sum(0);
        for (const S& x : b.w) sum += x;
        if (sum > S(0))
            for (S& x : b.w) x /= sum;
    }
}

// A two-player zero-sum blind stochastic game: per action pair a transition
// matrix over the states and a reward column in [0, 1]. Neither player ever
// observes states or rewards, so histories are action sequences only.
template <class S>
struct BlindGame {
    std::vector<std::string> states;
    std::vector<std::string> actions1;
    std::vector<std::string> actions2;
    std::vector<Matrix<S>> transitions;      // indexed by flattened pair
    std::vector<std::vector<S>> rewards;     // [pair][state]

    int num_states() const { return static_cast<int>(states.size()); }
    int num_actions1() const { return static_cast<int>(actions1.size()); }
    int num_actions2() const { return static_cast<int>(actions2.size()); }
    int num_pairs() const { return num_actions1() * num_actions2(); }

    int pair_index(int i, int j) const { return i * num_actions2() + j; }
    std::pair<int, int> split_pair(int a) const { return {a / num_actions2(), a % num_actions2()}; }

    const Matrix<S>& transition(int a) const { return transitions.at(static_cast<std::size_t>(a)); }
    const std::vector<S>& reward(int a) const { return rewards.at(static_cast<std::size_t>(a)); }
};

template <class S>
void check_pair_index(const BlindGame<S>& game, int a) {
    if (a < 0 || a >= game.num_pairs())
        throw UnknownActionError("action pair index " + std::to_string(a) + " out of range [0, " +
                                 std::to_string(game.num_pairs()) + ")");
}

// Full structural check of the game invariants. Error messages name the
// offending action pair and row so bad inputs are diagnosable from the CLI.
template <class S>
void validate_game(const BlindGame<S>& game) {
    const int k = game.num_states();
    if (k < 1) throw ShapeError("game needs at least one state");
    if (game.num_actions1() < 1 || game.num_actions2() < 1)
        throw ShapeError("each player needs at least one action");
    if (static_cast<int>(game.transitions.size()) != game.num_pairs())
        throw ShapeError("transition map does not cover all action pairs");
    if (static_cast<int>(game.rewards.size()) != game.num_pairs())
        throw ShapeError("reward map does not cover all action pairs");

    for (int a = 0; a < game.num_pairs(); ++a) {
        auto [i, j] = game.split_pair(a);
        const std::string where = "(" + game.actions1[i] + "|" + game.actions2[j] + ")";
        const Matrix<S>& p = game.transition(a);
        if (p.rows() != k || p.cols() != k)
            throw ShapeError("transition matrix for " + where + " is not " + std::to_string(k) + "x" +
                             std::to_string(k));
        for (int r = 0; r < k; ++r) {
            S sum(0);
            for (int c = 0; c < k; ++c) {
                if (p.at(r, c) < S(0))
                    throw NegativeEntryError("negative transition probability at " + where + " row " +
                                             game.states[r]);
                sum += p.at(r, c);
            }
            if (!num_traits<S>::row_sum_ok(sum))
                throw RowSumError("row " + game.states[r] + " of transition " + where +
                                  " does not sum to 1");
        }
        const std::vector<S>& g = game.reward(a);
        if (static_cast<int>(g.size()) != k)
            throw ShapeError("reward vector for " + where + " has wrong length");
        for (int r = 0; r < k; ++r) {
            if (g[r] < S(0) || g[r] > S(1))
                throw RewardRangeError("reward at " + where + " state " + game.states[r] +
                                       " outside [0, 1]");
        }
    }
}

// Forward product T^n(a^n) = P(a_1) P(a_2) ... P(a_n); the empty sequence is
// the identity.
template <class S>
Matrix<S> forward_product(const BlindGame<S>& game, const ActionSequence& seq) {
    Matrix<S> t = Matrix<S>::identity(game.num_states());
    for (int a : seq) {
        check_pair_index(game, a);
        t = t.multiply(game.transition(a));
    }
    return t;
}

// One belief update b' = b^T P(i, j).
template <class S>
Belief<S> belief_step(const BlindGame<S>& game, const Belief<S>& b, int pair) {
    check_pair_index(game, pair);
    if (b.size() != game.num_states()) throw ShapeError("belief dimension mismatch");
    Belief<S> out(row_times_matrix(b.w, game.transition(pair)));
    renormalize(out);
    return out;
}

// Belief-weighted stage reward sum_k b(k) g(k, i, j).
template <class S>
S stage_reward(const BlindGame<S>& game, const Belief<S>& b, int pair) {
    check_pair_index(game, pair);
    if (b.size() != game.num_states()) throw ShapeError("belief dimension mismatch");
    const std::vector<S>& g = game.reward(pair);
    S r(0);
    for (int k = 0; k < b.size(); ++k) r += b.w[k] * g[k];
    return r;
}

}  // namespace ergo
