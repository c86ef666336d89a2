#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "ergo/game.hpp"
#include "ergo/matrix.hpp"
#include "ergo/numeric.hpp"
#include "ergo/pfa.hpp"

namespace ergo_test {

template <class S>
ergo::Matrix<S> mat(std::initializer_list<std::initializer_list<const char*>> rows) {
    int n = static_cast<int>(rows.size());
    int m = static_cast<int>(rows.begin()->size());
    ergo::Matrix<S> out(n, m);
    int r = 0;
    for (const auto& row : rows) {
        int c = 0;
        for (const char* cell : row) out.at(r, c++) = ergo::scalar_from_string<S>(cell);
        ++r;
    }
    return out;
}

template <class S>
std::vector<S> vec(std::initializer_list<const char*> cells) {
    std::vector<S> out;
    for (const char* cell : cells) out.push_back(ergo::scalar_from_string<S>(cell));
    return out;
}

template <class S>
ergo::Belief<S> belief(std::initializer_list<const char*> cells) {
    return ergo::Belief<S>(vec<S>(cells));
}

// The three-state machine-maintenance blind MDP bundled under data/.
template <class S>
ergo::BlindGame<S> machine_maintenance() {
    ergo::BlindGame<S> g;
    g.states = {"G", "F", "P"};
    g.actions1 = {"Wait", "Basic", "Critical"};
    g.actions2 = {"*"};
    g.transitions = {
        mat<S>({{"0.9", "0.1", "0"}, {"0", "0.7", "0.3"}, {"0", "0.1", "0.9"}}),
        mat<S>({{"0.95", "0.05", "0"}, {"0.8", "0.2", "0"}, {"0", "0.3", "0.7"}}),
        mat<S>({{"1", "0", "0"}, {"0.9", "0.1", "0"}, {"0.3", "0.65", "0.05"}}),
    };
    g.rewards = {
        vec<S>({"0.9", "0.55", "0.05"}),
        vec<S>({"0.1", "0.7", "0.4"}),
        vec<S>({"0.1", "0.5", "0.85"}),
    };
    return g;
}

// Two actions on two states: a swap permutation and the identity. Products
// stay permutations, so the game is never ergodic.
template <class S>
ergo::BlindGame<S> swap_identity() {
    ergo::BlindGame<S> g;
    g.states = {"s0", "s1"};
    g.actions1 = {"swap", "stay"};
    g.actions2 = {"*"};
    g.transitions = {
        mat<S>({{"0", "1"}, {"1", "0"}}),
        mat<S>({{"1", "0"}, {"0", "1"}}),
    };
    g.rewards = {vec<S>({"1", "0"}), vec<S>({"0", "1"})};
    return g;
}

// Single action whose matrix is stable; the belief jumps to the common row
// and stays there.
template <class S>
ergo::BlindGame<S> single_stable(const char* reward = "0.3") {
    ergo::BlindGame<S> g;
    g.states = {"x", "y"};
    g.actions1 = {"go"};
    g.actions2 = {"*"};
    g.transitions = {mat<S>({{"0.25", "0.75"}, {"0.25", "0.75"}})};
    g.rewards = {vec<S>({reward, reward})};
    return g;
}

// Two-state PFA with a single symbol; acceptance 1/2 after "a", 3/4 after
// "aa". The accepting state is absorbing, so this one is built in memory
// only.
template <class S>
ergo::Pfa<S> half_then_three_quarters() {
    ergo::Pfa<S> pfa;
    pfa.states = {"s1", "s2"};
    pfa.symbols = {"a"};
    pfa.transitions = {mat<S>({{"1/2", "1/2"}, {"0", "1"}})};
    pfa.accepting = {0, 1};
    pfa.initial = 0;
    return pfa;
}

}  // namespace ergo_test
