#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/game.hpp"
#include "ergo/matrix.hpp"
#include "ergo/numeric.hpp"

namespace ergo {

// Probabilistic finite automaton: words over the symbol set are accepted with
// the probability mass sitting on the accepting states after reading them.
template <class S>
struct Pfa {
    std::vector<std::string> states;
    std::vector<std::string> symbols;
    std::vector<Matrix<S>> transitions;  // per symbol
    std::vector<char> accepting;         // flag per state
    int initial = 0;

    int num_states() const { return static_cast<int>(states.size()); }
    int num_symbols() const { return static_cast<int>(symbols.size()); }
};

using Word = std::vector<int>;  // symbol indices

template <class S>
void check_symbol_index(const Pfa<S>& pfa, int s) {
    if (s < 0 || s >= pfa.num_symbols())
        throw UnknownSymbolError("symbol index " + std::to_string(s) + " out of range [0, " +
                                 std::to_string(pfa.num_symbols()) + ")");
}

// Structural checks. The accepting set must contain no absorbing state: for
// each accepting k some symbol must move probability mass off k. File input
// enforces this; programmatic construction may skip it, since the acceptance
// and block-payoff computations are well defined either way.
template <class S>
void validate_pfa(const Pfa<S>& pfa, bool require_nonabsorbing_accepting = true) {
    const int k = pfa.num_states();
    if (k < 1) throw ShapeError("PFA needs at least one state");
    if (pfa.num_symbols() < 1) throw ShapeError("PFA needs at least one symbol");
    if (static_cast<int>(pfa.transitions.size()) != pfa.num_symbols())
        throw ShapeError("transition map does not cover all symbols");
    if (static_cast<int>(pfa.accepting.size()) != k) throw ShapeError("accepting flags have wrong length");
    if (pfa.initial < 0 || pfa.initial >= k) throw ShapeError("initial state out of range");
    for (int s = 0; s < pfa.num_symbols(); ++s) {
        const Matrix<S>& p = pfa.transitions[static_cast<std::size_t>(s)];
        if (p.rows() != k || p.cols() != k)
            throw ShapeError("transition matrix for symbol " + pfa.symbols[static_cast<std::size_t>(s)] +
                             " is not " + std::to_string(k) + "x" + std::to_string(k));
        for (int r = 0; r < k; ++r) {
            S sum(0);
            for (int c = 0; c < k; ++c) {
                if (p.at(r, c) < S(0))
                    throw NegativeEntryError("negative transition probability for symbol " +
                                             pfa.symbols[static_cast<std::size_t>(s)]);
                sum += p.at(r, c);
            }
            if (!num_traits<S>::row_sum_ok(sum))
                throw RowSumError("row " + pfa.states[static_cast<std::size_t>(r)] + " for symbol " +
                                  pfa.symbols[static_cast<std::size_t>(s)] + " does not sum to 1");
        }
    }
    if (require_nonabsorbing_accepting) {
        for (int b = 0; b < k; ++b) {
            if (!pfa.accepting[static_cast<std::size_t>(b)]) continue;
            bool moves = false;
            for (int s = 0; s < pfa.num_symbols() && !moves; ++s)
                if (pfa.transitions[static_cast<std::size_t>(s)].at(b, b) != S(1)) moves = true;
            if (!moves)
                throw ValidationError("accepting state " + pfa.states[static_cast<std::size_t>(b)] +
                                      " is absorbing");
        }
    }
}

// Probability that the word moves the automaton from the initial Dirac
// distribution into the accepting set. The empty word accepts iff the initial
// state itself is accepting.
template <class S>
S acceptance_probability(const Pfa<S>& pfa, const Word& word) {
    std::vector<S> dist(static_cast<std::size_t>(pfa.num_states()), S(0));
    dist[static_cast<std::size_t>(pfa.initial)] = S(1);
    for (int s : word) {
        check_symbol_index(pfa, s);
        dist = row_times_matrix(dist, pfa.transitions[static_cast<std::size_t>(s)]);
    }
    S acc(0);
    for (int k = 0; k < pfa.num_states(); ++k)
        if (pfa.accepting[static_cast<std::size_t>(k)]) acc += dist[static_cast<std::size_t>(k)];
    return acc;
}

template <class S>
struct ReducedGame {
    BlindGame<S> game;
    Belief<S> initial_belief;  // Dirac at the PFA's initial state
    int sink_state;            // index of the added absorbing-under-symbols state
    int restart_action;        // index of the added action
};

namespace detail {

inline std::string fresh_name(std::string base, const std::vector<std::string>& taken) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += "_";
    return base;
}

}  // namespace detail

// Builds the blind MDP whose long-run average value sits strictly above 1/2
// exactly when the PFA accepts some word with probability above 1/2. A fresh
// sink state is reached from everywhere with probability theta under every
// symbol, which makes each symbol's transition matrix Markov; a fresh Restart
// action maps every state back to the initial state and pays out the
// acceptance indicator.
template <class S>
ReducedGame<S> reduce_to_blind_mdp(const Pfa<S>& pfa, const S& theta) {
    if (!(theta > S(0) && theta < S(1))) throw DomainError("theta must lie strictly inside (0, 1)");
    validate_pfa(pfa, /*require_nonabsorbing_accepting=*/false);

    const int k = pfa.num_states();
    const int sink = k;
    const S half = S(1) / S(2);

    ReducedGame<S> out;
    out.sink_state = sink;
    out.restart_action = pfa.num_symbols();

    BlindGame<S>& g = out.game;
    g.states = pfa.states;
    g.states.push_back(detail::fresh_name("sink", pfa.states));
    g.actions1 = pfa.symbols;
    g.actions1.push_back(detail::fresh_name("Restart", pfa.symbols));
    g.actions2 = {"*"};

    for (int s = 0; s < pfa.num_symbols(); ++s) {
        Matrix<S> p(k + 1, k + 1);
        const Matrix<S>& old = pfa.transitions[static_cast<std::size_t>(s)];
        for (int r = 0; r < k; ++r) {
            for (int c = 0; c < k; ++c) p.at(r, c) = (S(1) - theta) * old.at(r, c);
            p.at(r, sink) = theta;
        }
        p.at(sink, sink) = S(1);
        g.transitions.push_back(std::move(p));
        g.rewards.emplace_back(static_cast<std::size_t>(k + 1), half);
    }
    {
        Matrix<S> p(k + 1, k + 1);
        for (int r = 0; r <= k; ++r) p.at(r, pfa.initial) = S(1);
        g.transitions.push_back(std::move(p));
        std::vector<S> reward(static_cast<std::size_t>(k + 1), S(0));
        for (int c = 0; c < k; ++c)
            if (pfa.accepting[static_cast<std::size_t>(c)]) reward[static_cast<std::size_t>(c)] = S(1);
        reward[static_cast<std::size_t>(sink)] = half;
        g.rewards.push_back(std::move(reward));
    }

    out.initial_belief = Belief<S>::dirac(pfa.initial, k + 1);
    return out;
}

// Exact expected average reward of one block of the cyclic strategy
// (word, Restart) in the reduced game:
//   [ N/2 + (1 - (1-theta)^N)/2 + (1-theta)^N * acc(word) ] / (N + 1).
// Strictly above 1/2 iff the acceptance probability is strictly above 1/2.
template <class S>
S cyclic_block_payoff(const Pfa<S>& pfa, const S& theta, const Word& word) {
    if (!(theta > S(0) && theta < S(1))) throw DomainError("theta must lie strictly inside (0, 1)");
    const long long n = static_cast<long long>(word.size());
    if (n < 1) throw DomainError("cyclic block needs a word of length >= 1");
    const S survive = pow_int(S(1) - theta, n);
    const S acc = acceptance_probability(pfa, word);
    const S half = S(1) / S(2);
    S total = S(n) * half + (S(1) - survive) * half + survive * acc;
    return total / S(n + 1);
}

// Exhaustive length-lexicographic search for a word accepted with probability
// strictly greater than 1/2, up to the given length. Words sharing a state
// distribution with an earlier word of the same length are merged: their
// subtrees accept with identical probabilities, so pruning them cannot skip
// the first hit.
template <class S>
std::optional<Word> exists_word_above_half(const Pfa<S>& pfa, int max_len,
                                           std::uint64_t max_frontier = 1u << 20) {
    const S half = S(1) / S(2);
    auto accepted_mass = [&](const std::vector<S>& dist) {
        S acc(0);
        for (int k = 0; k < pfa.num_states(); ++k)
            if (pfa.accepting[static_cast<std::size_t>(k)]) acc += dist[static_cast<std::size_t>(k)];
        return acc;
    };

    std::vector<S> start(static_cast<std::size_t>(pfa.num_states()), S(0));
    start[static_cast<std::size_t>(pfa.initial)] = S(1);
    if (accepted_mass(start) > half) return Word{};

    std::vector<std::pair<Word, std::vector<S>>> frontier{{Word{}, start}};
    std::map<std::vector<S>, bool> seen;
    seen.emplace(start, true);
    for (int len = 1; len <= max_len; ++len) {
        std::vector<std::pair<Word, std::vector<S>>> next;
        for (const auto& [word, dist] : frontier) {
            for (int s = 0; s < pfa.num_symbols(); ++s) {
                std::vector<S> d = row_times_matrix(dist, pfa.transitions[static_cast<std::size_t>(s)]);
                Word w = word;
                w.push_back(s);
                if (accepted_mass(d) > half) return w;
                if (seen.emplace(d, true).second) {
                    next.emplace_back(std::move(w), std::move(d));
                    if (next.size() > max_frontier)
                        throw BudgetExceededError("word search frontier exceeded budget");
                }
            }
        }
        frontier = std::move(next);
    }
    return std::nullopt;
}

}  // namespace ergo
