#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <utility>
#include <vector>

#include "ergo/analysis.hpp"
#include "ergo/ergodicity.hpp"
#include "ergo/errors.hpp"
#include "ergo/game.hpp"

namespace ergo {

namespace detail {

// Beliefs are deduplicated by exact equality in exact mode; in float mode
// each coordinate is quantized to 12 decimal digits and the quantized tuple
// is the key.
template <class S>
struct BeliefKeyOf {
    using type = std::vector<S>;
    static type make(const Belief<S>& b) { return b.w; }
};

template <>
struct BeliefKeyOf<double> {
    using type = std::vector<std::int64_t>;
    static type make(const Belief<double>& b) {
        type key;
        key.reserve(b.w.size());
        for (double x : b.w) key.push_back(std::llround(x * 1e12));
        return key;
    }
};

template <class S>
using BeliefKey = typename BeliefKeyOf<S>::type;

}  // namespace detail

// Block matrices of one fixed length n: the exact forward product T^n(a^n)
// paired with its column-mean stable approximation. Entries are materialized
// lazily, keyed by the action sequence; prefix products of length < n are
// cached as well for proj.
template <class S>
class StableMatrixFamily {
  public:
    StableMatrixFamily(const BlindGame<S>& game, S eps, long long n)
        : game_(&game), eps_(std::move(eps)), n_(n) {
        if (n < 1) throw DomainError("stable matrix family needs block length >= 1");
    }

    long long block_length() const { return n_; }
    const S& eps() const { return eps_; }
    bool fully_materialized() const { return complete_; }

    // Exact product of any sequence with length <= n, cached.
    const Matrix<S>& product(const ActionSequence& seq) {
        if (static_cast<long long>(seq.size()) > n_)
            throw DomainError("sequence longer than the family block length");
        auto it = products_.find(seq);
        if (it != products_.end()) return it->second;
        Matrix<S> m;
        if (seq.empty()) {
            m = Matrix<S>::identity(game_->num_states());
        } else {
            ActionSequence head(seq.begin(), seq.end() - 1);
            m = product(head).multiply(game_->transition(seq.back()));
        }
        return products_.emplace(seq, std::move(m)).first->second;
    }

    // The pair (T^n, stable approximation) for a full-length sequence.
    std::pair<const Matrix<S>*, Matrix<S>> entry(const ActionSequence& seq) {
        if (static_cast<long long>(seq.size()) != n_)
            throw DomainError("family entries are keyed by sequences of the block length");
        const Matrix<S>& t = product(seq);
        return {&t, stable_approximation(t)};
    }

    // Common row of the stable approximation for a full-length sequence.
    Belief<S> stable_row(const ActionSequence& seq) {
        if (static_cast<long long>(seq.size()) != n_)
            throw DomainError("family entries are keyed by sequences of the block length");
        Belief<S> b(column_means(product(seq)));
        renormalize(b);
        return b;
    }

    void mark_fully_materialized() { complete_ = true; }

  private:
    const BlindGame<S>* game_;
    S eps_;
    long long n_;
    bool complete_ = false;
    std::map<ActionSequence, Matrix<S>> products_;
};

// State of the abstract game: an abstract belief plus the action-pair prefix
// accumulated inside the current block (length < n).
template <class S>
struct AbstractState {
    Belief<S> base;
    ActionSequence prefix;

    bool operator==(const AbstractState& o) const { return base == o.base && prefix == o.prefix; }
};

// proj: the belief the abstract state stands for. Root states carry their
// base; prefix states push the base through the exact prefix product.
template <class S>
Belief<S> proj(const AbstractState<S>& x, StableMatrixFamily<S>& family, const BlindGame<S>&) {
    if (x.prefix.empty()) return x.base;
    Belief<S> b(row_times_matrix(x.base.w, family.product(x.prefix)));
    renormalize(b);
    return b;
}

// One abstract transition: append the pair while the block is open, else jump
// to the root state at the common row of the block's stable approximation.
// The jump target does not depend on the base because the approximation is
// stable.
template <class S>
AbstractState<S> abstract_update(const AbstractState<S>& x, int pair, StableMatrixFamily<S>& family,
                                 const BlindGame<S>& game) {
    check_pair_index(game, pair);
    const long long n = family.block_length();
    if (static_cast<long long>(x.prefix.size()) >= n)
        throw DomainError("abstract state prefix is as long as the block");
    if (static_cast<long long>(x.prefix.size()) <= n - 2) {
        AbstractState<S> next{x.base, x.prefix};
        next.prefix.push_back(pair);
        return next;
    }
    ActionSequence full = x.prefix;
    full.push_back(pair);
    return AbstractState<S>{family.stable_row(full), {}};
}

// The deduplicated set of abstract beliefs: the common rows of all length-n
// stable approximations, plus the initial belief. Equal products are merged
// layer by layer, so the enumeration does not expand |A|^n sequences blindly.
template <class S>
std::vector<Belief<S>> abstract_belief_set(const BlindGame<S>& game, const Belief<S>& b1, const S& eps,
                                           const ErgodicityCertificate<S>& cert,
                                           const SearchBudget& budget = {}) {
    if (!cert.ergodic())
        throw NotErgodicError("abstract beliefs need an ergodic game", cert.counterexample);
    const long long n = n_epsilon(game, cert, eps);

    std::map<Matrix<S>, bool> layer;
    for (int a = 0; a < game.num_pairs(); ++a) layer.emplace(game.transition(a), true);
    for (long long step = 1; step < n; ++step) {
        std::map<Matrix<S>, bool> next;
        for (const auto& [m, _] : layer)
            for (int a = 0; a < game.num_pairs(); ++a) {
                next.emplace(m.multiply(game.transition(a)), true);
                if (next.size() > budget.max_products)
                    throw BudgetExceededError("abstract belief enumeration exceeded budget");
            }
        layer = std::move(next);
    }

    std::map<detail::BeliefKey<S>, Belief<S>> dedup;
    auto insert = [&dedup](const Belief<S>& b) { dedup.emplace(detail::BeliefKeyOf<S>::make(b), b); };
    insert(b1);
    for (const auto& [m, _] : layer) {
        Belief<S> row(column_means(m));
        renormalize(row);
        insert(row);
    }
    std::vector<Belief<S>> out;
    out.reserve(dedup.size());
    for (auto& [k, b] : dedup) out.push_back(std::move(b));
    return out;
}

// Finite zero-sum stochastic game with deterministic transitions produced by
// the abstraction. State 0 is the root (b1, empty prefix).
template <class S>
struct AbstractGame {
    long long n_eps = 1;
    std::vector<std::string> actions1, actions2;
    std::vector<AbstractState<S>> states;
    std::vector<Belief<S>> projections;        // proj per state
    std::vector<std::vector<int>> succ;        // [state][pair] -> state
    std::vector<std::vector<S>> reward;        // [state][pair]
    std::vector<Belief<S>> beliefs;            // deduplicated bases (incl. root's)

    int num_actions1() const { return static_cast<int>(actions1.size()); }
    int num_actions2() const { return static_cast<int>(actions2.size()); }
    int num_pairs() const { return num_actions1() * num_actions2(); }
    int pair_index(int i, int j) const { return i * num_actions2() + j; }
    std::pair<int, int> split_pair(int a) const { return {a / num_actions2(), a % num_actions2()}; }
    std::size_t num_states() const { return states.size(); }
};

// Breadth-first reachable closure from the root under the abstract update.
// Transitions are total and stay inside the returned state set.
template <class S>
AbstractGame<S> build_abstract_game(const BlindGame<S>& game, const Belief<S>& b1, const S& eps,
                                    const ErgodicityCertificate<S>& cert,
                                    const SearchBudget& budget = {}) {
    if (!cert.ergodic())
        throw NotErgodicError("abstract game needs an ergodic game", cert.counterexample);
    validate_belief(b1);
    if (b1.size() != game.num_states()) throw ShapeError("initial belief dimension mismatch");
    const long long n = n_epsilon(game, cert, eps);

    AbstractGame<S> out;
    out.n_eps = n;
    out.actions1 = game.actions1;
    out.actions2 = game.actions2;

    using Key = std::pair<detail::BeliefKey<S>, ActionSequence>;
    std::map<Key, int> index;
    std::map<ActionSequence, Matrix<S>> prefix_products;
    prefix_products.emplace(ActionSequence{}, Matrix<S>::identity(game.num_states()));

    std::map<detail::BeliefKey<S>, Belief<S>> bases;

    auto intern = [&](Belief<S> base, const ActionSequence& prefix, const Belief<S>& projection) -> int {
        Key key{detail::BeliefKeyOf<S>::make(base), prefix};
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        int id = static_cast<int>(out.states.size());
        if (out.states.size() >= budget.max_states)
            throw BudgetExceededError("abstract game exceeded the state budget (" +
                                      std::to_string(budget.max_states) + ")");
        bases.emplace(key.first, base);
        index.emplace(std::move(key), id);
        out.states.push_back(AbstractState<S>{std::move(base), prefix});
        out.projections.push_back(projection);
        out.succ.emplace_back();
        out.reward.emplace_back();
        return id;
    };

    intern(b1, {}, b1);
    for (std::size_t cur = 0; cur < out.states.size(); ++cur) {
        const AbstractState<S> x = out.states[cur];  // copy: vector may reallocate
        const Belief<S> projection = out.projections[cur];
        const long long m = static_cast<long long>(x.prefix.size());
        out.succ[cur].assign(static_cast<std::size_t>(game.num_pairs()), -1);
        out.reward[cur].assign(static_cast<std::size_t>(game.num_pairs()), S(0));
        for (int a = 0; a < game.num_pairs(); ++a) {
            out.reward[cur][static_cast<std::size_t>(a)] = stage_reward(game, projection, a);
            int child;
            if (m <= n - 2) {
                ActionSequence next_prefix = x.prefix;
                next_prefix.push_back(a);
                Belief<S> child_proj(belief_step(game, projection, a));
                if (prefix_products.find(next_prefix) == prefix_products.end())
                    prefix_products.emplace(next_prefix,
                                            prefix_products.at(x.prefix).multiply(game.transition(a)));
                child = intern(x.base, next_prefix, child_proj);
            } else {
                Matrix<S> full = prefix_products.at(x.prefix).multiply(game.transition(a));
                Belief<S> row(column_means(full));
                renormalize(row);
                child = intern(row, {}, row);
            }
            out.succ[cur][static_cast<std::size_t>(a)] = child;
        }
    }

    out.beliefs.reserve(bases.size());
    for (auto& [k, b] : bases) out.beliefs.push_back(std::move(b));
    return out;
}

}  // namespace ergo
