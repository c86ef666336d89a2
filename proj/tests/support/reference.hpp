#pragma once

// Independent oracles used only by tests: straight-line implementations that
// share no code path with the algorithms they check.

#include <optional>
#include <vector>

#include "ergo/abstraction.hpp"
#include "ergo/analysis.hpp"
#include "ergo/ergodicity.hpp"
#include "ergo/game.hpp"

namespace ergo_test {

// tau1 through the row-overlap identity: 1 - min over row pairs of the
// summed columnwise minima.
template <class S>
S tau1_overlap(const ergo::Matrix<S>& m) {
    const int n = m.rows();
    std::optional<S> least;
    for (int k = 0; k < n; ++k) {
        for (int kb = k + 1; kb < n; ++kb) {
            S overlap(0);
            for (int c = 0; c < n; ++c)
                overlap += m.at(k, c) < m.at(kb, c) ? m.at(k, c) : m.at(kb, c);
            if (!least || overlap < *least) least = overlap;
        }
    }
    return least ? S(1) - *least : S(0);
}

// Brute-force ergodicity verdict: enumerate every action sequence of each
// length up to the Paz bound as an exact numeric product and test tau1 < 1
// directly. No pattern arithmetic, no deduplication.
template <class S>
struct BruteForceVerdict {
    bool ergodic = false;
    long long n0 = 0;
};

template <class S>
BruteForceVerdict<S> exhaustive_ergodic_verdict(const ergo::BlindGame<S>& game) {
    const long long limit = std::max<long long>(1, ergo::paz_bound(game.num_states()));
    for (long long n = 1; n <= limit; ++n) {
        bool all_mixing = true;
        std::vector<int> seq(static_cast<std::size_t>(n), 0);
        while (true) {
            ergo::Matrix<S> t = ergo::forward_product(game, seq);
            if (!(ergo::tau1(t) < S(1))) {
                all_mixing = false;
                break;
            }
            long long pos = n - 1;
            while (pos >= 0 && seq[static_cast<std::size_t>(pos)] == game.num_pairs() - 1)
                seq[static_cast<std::size_t>(pos--)] = 0;
            if (pos < 0) break;
            ++seq[static_cast<std::size_t>(pos)];
        }
        if (all_mixing) return {true, n};
    }
    return {false, 0};
}

// The exact belief game unrolled to depth N as a finite deterministic graph:
// one node per history, rewards read off the exact beliefs. Leaves self-loop
// with zero reward, which a horizon-N induction from the root never reads.
template <class S>
ergo::AbstractGame<S> belief_tree_game(const ergo::BlindGame<S>& game, const ergo::Belief<S>& b1,
                                       long long depth) {
    ergo::AbstractGame<S> tree;
    tree.n_eps = 1;
    tree.actions1 = game.actions1;
    tree.actions2 = game.actions2;

    struct Node {
        ergo::Belief<S> belief;
        long long level;
    };
    std::vector<Node> todo{{b1, 0}};
    for (std::size_t cur = 0; cur < todo.size(); ++cur) {
        Node node = todo[cur];
        tree.states.push_back(ergo::AbstractState<S>{node.belief, {}});
        tree.projections.push_back(node.belief);
        tree.succ.emplace_back(static_cast<std::size_t>(game.num_pairs()), static_cast<int>(cur));
        tree.reward.emplace_back(static_cast<std::size_t>(game.num_pairs()), S(0));
        if (node.level < depth) {
            for (int a = 0; a < game.num_pairs(); ++a) {
                tree.reward[cur][static_cast<std::size_t>(a)] = ergo::stage_reward(game, node.belief, a);
                tree.succ[cur][static_cast<std::size_t>(a)] = static_cast<int>(todo.size());
                todo.push_back({ergo::belief_step(game, node.belief, a), node.level + 1});
            }
        }
    }
    return tree;
}

}  // namespace ergo_test
