#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <thread>
#include <vector>

#include "ergo/analysis.hpp"
#include "ergo/errors.hpp"
#include "ergo/game.hpp"
#include "ergo/pattern.hpp"

namespace ergo {

// Caps for the exponential searches. The worst case genuinely needs
// exponential space, so running out of budget fails loudly instead of
// degrading to an unsound "unknown".
struct SearchBudget {
    std::uint64_t max_patterns = 1u << 22;   // per layer of the pattern search
    std::uint64_t max_products = 1u << 20;   // per layer of numeric product sets
    std::uint64_t max_states = 1000000;      // abstract game reachable closure
    double max_seconds = 0;                  // 0 = no wall-clock limit

    void check_time(std::chrono::steady_clock::time_point start, const char* what) const {
        if (max_seconds <= 0) return;
        auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);
        if (elapsed.count() > max_seconds)
            throw BudgetExceededError(std::string(what) + " exceeded the wall-clock budget");
    }
};

// Upper bound on the block length that certifies ergodicity:
// (3^k - 2^(k+1) + 1) / 2.
inline long long paz_bound(int k) {
    if (k < 1) throw DomainError("paz_bound requires k >= 1");
    long long p3 = 1, p2 = 2;
    for (int i = 0; i < k; ++i)
        if (__builtin_mul_overflow(p3, 3ll, &p3)) throw OverflowError("paz_bound overflows for k=" + std::to_string(k));
    if (k + 1 >= 63) throw OverflowError("paz_bound overflows for k=" + std::to_string(k));
    p2 = 1ll << (k + 1);
    return (p3 - p2 + 1) / 2;
}

enum class Verdict { Ergodic, NotErgodic };

template <class S>
struct ErgodicityCertificate {
    Verdict verdict = Verdict::NotErgodic;
    long long paz = 0;             // search bound used
    long long n0 = 0;              // smallest all-scrambling layer (Ergodic only)
    S tau_bar{};                   // max tau1 over all length-n0 products (Ergodic only)
    ActionSequence counterexample; // length = paz, non-scrambling product (NotErgodic only)

    bool ergodic() const { return verdict == Verdict::Ergodic; }
};

namespace detail {

// One deduplicated layer of the pattern search plus back-pointers into an
// arena, so a witness sequence can be reconstructed without storing a full
// sequence per pattern.
struct PatternLayer {
    std::map<BooleanPattern, std::size_t> entries;  // pattern -> arena index
};

struct ArenaNode {
    std::int64_t parent;  // arena index of the previous pattern, -1 at layer 1
    int action;
};

inline ActionSequence arena_walk(const std::vector<ArenaNode>& arena, std::size_t idx) {
    ActionSequence seq;
    std::int64_t cur = static_cast<std::int64_t>(idx);
    while (cur >= 0) {
        seq.push_back(arena[static_cast<std::size_t>(cur)].action);
        cur = arena[static_cast<std::size_t>(cur)].parent;
    }
    std::reverse(seq.begin(), seq.end());
    return seq;
}

}  // namespace detail

// Decides the ergodic property by a layered search over boolean patterns:
// layer n holds the supports of all length-n forward products, deduplicated.
// The game is ergodic iff some layer n0 <= paz bound is entirely scrambling
// (tau1 < 1 exactly corresponds to a scrambling support), and the smallest
// such n0 is reported. Otherwise a witness sequence of length = paz bound
// whose product is non-scrambling is reconstructed. Layers evolve
// deterministically, so reaching a fixpoint before the bound settles the
// verdict early; the witness is then extended backwards through the fixpoint.
template <class S>
ErgodicityCertificate<S> verify_ergodic(const BlindGame<S>& game, const SearchBudget& budget = {},
                                        int threads = 1);

// Exact maximum of tau1 over all |A|^n0 forward products of length n0.
// Distinct sequences with equal products are collapsed layer by layer, and
// the final maximum fans out over a small thread pool; the result does not
// depend on the thread count.
template <class S>
S tau_bar(const BlindGame<S>& game, long long n0, const SearchBudget& budget = {}, int threads = 1) {
    if (n0 < 1) throw DomainError("tau_bar requires n0 >= 1");
    auto start = std::chrono::steady_clock::now();
    std::map<Matrix<S>, bool> layer;
    for (int a = 0; a < game.num_pairs(); ++a) layer.emplace(game.transition(a), true);
    for (long long step = 1; step < n0; ++step) {
        std::map<Matrix<S>, bool> next;
        for (const auto& [m, _] : layer) {
            for (int a = 0; a < game.num_pairs(); ++a) {
                next.emplace(m.multiply(game.transition(a)), true);
                if (next.size() > budget.max_products)
                    throw BudgetExceededError("tau_bar product set exceeded budget at length " +
                                              std::to_string(step + 1));
            }
        }
        layer = std::move(next);
        budget.check_time(start, "tau_bar");
    }

    std::vector<const Matrix<S>*> mats;
    mats.reserve(layer.size());
    for (const auto& [m, _] : layer) mats.push_back(&m);

    int workers = std::max(1, threads);
    workers = std::min<int>(workers, static_cast<int>(mats.size()) == 0 ? 1 : static_cast<int>(mats.size()));
    std::vector<S> partial(static_cast<std::size_t>(workers), S(0));
    auto run = [&](int w) {
        S best(0);
        for (std::size_t idx = static_cast<std::size_t>(w); idx < mats.size(); idx += static_cast<std::size_t>(workers)) {
            S t = tau1(*mats[idx]);
            if (t > best) best = t;
        }
        partial[static_cast<std::size_t>(w)] = best;
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    S best(0);
    for (const S& t : partial)
        if (t > best) best = t;
    return best;
}

template <class S>
ErgodicityCertificate<S> verify_ergodic(const BlindGame<S>& game, const SearchBudget& budget,
                                        int threads) {
    const int k = game.num_states();
    const int na = game.num_pairs();
    auto start = std::chrono::steady_clock::now();

    ErgodicityCertificate<S> cert;
    cert.paz = paz_bound(k);
    const long long limit = std::max<long long>(1, cert.paz);

    std::vector<BooleanPattern> base;
    base.reserve(static_cast<std::size_t>(na));
    for (int a = 0; a < na; ++a) base.push_back(pattern_of(game.transition(a)));

    std::vector<detail::ArenaNode> arena;
    detail::PatternLayer layer;
    for (int a = 0; a < na; ++a) {
        auto [it, fresh] = layer.entries.try_emplace(base[static_cast<std::size_t>(a)], arena.size());
        if (fresh) arena.push_back({-1, a});
    }

    auto all_scrambling = [](const detail::PatternLayer& l) {
        for (const auto& [p, _] : l.entries)
            if (!is_scrambling(p)) return false;
        return true;
    };

    for (long long n = 1;; ++n) {
        if (all_scrambling(layer)) {
            cert.verdict = Verdict::Ergodic;
            cert.n0 = n;
            cert.tau_bar = tau_bar(game, n, budget, threads);
            return cert;
        }
        if (n == limit) {
            // Witness already has the required length.
            for (const auto& [p, idx] : layer.entries) {
                if (!is_scrambling(p)) {
                    cert.counterexample = detail::arena_walk(arena, idx);
                    break;
                }
            }
            cert.verdict = Verdict::NotErgodic;
            return cert;
        }

        detail::PatternLayer next;
        for (const auto& [p, idx] : layer.entries) {
            for (int a = 0; a < na; ++a) {
                BooleanPattern q = pattern_product(p, base[static_cast<std::size_t>(a)]);
                auto [it, fresh] = next.entries.try_emplace(std::move(q), arena.size());
                if (fresh) {
                    arena.push_back({static_cast<std::int64_t>(idx), a});
                    if (next.entries.size() > budget.max_patterns)
                        throw BudgetExceededError("pattern layer exceeded budget at length " +
                                                  std::to_string(n + 1));
                }
            }
        }
        budget.check_time(start, "verify_ergodic");

        if (next.entries.size() == layer.entries.size() &&
            std::equal(next.entries.begin(), next.entries.end(), layer.entries.begin(),
                       [](const auto& a, const auto& b) { return a.first == b.first; })) {
            // Fixpoint: every later layer equals this one, so the layer at the
            // Paz bound contains a non-scrambling pattern. Walk backwards
            // through the fixpoint to stretch a witness to the exact bound.
            BooleanPattern target;
            std::size_t target_idx = 0;
            for (const auto& [p, idx] : layer.entries) {
                if (!is_scrambling(p)) {
                    target = p;
                    target_idx = idx;
                    break;
                }
            }
            ActionSequence suffix;
            BooleanPattern cur = target;
            for (long long step = 0; step < limit - n; ++step) {
                bool found = false;
                for (const auto& [q, qidx] : layer.entries) {
                    for (int a = 0; a < na; ++a) {
                        if (pattern_product(q, base[static_cast<std::size_t>(a)]) == cur) {
                            suffix.push_back(a);
                            cur = q;
                            target_idx = qidx;
                            found = true;
                            break;
                        }
                    }
                    if (found) break;
                }
                if (!found)
                    throw Error("internal: fixpoint layer lost a predecessor");
                budget.check_time(start, "verify_ergodic witness");
            }
            cert.counterexample = detail::arena_walk(arena, target_idx);
            std::reverse(suffix.begin(), suffix.end());
            cert.counterexample.insert(cert.counterexample.end(), suffix.begin(), suffix.end());
            cert.verdict = Verdict::NotErgodic;
            return cert;
        }
        layer = std::move(next);
    }
}

// n_eps = n0 * max(1, ceil(ln eps / ln tau_bar)): the block length after
// which every forward product has tau1 <= eps. The tau_bar = 0 edge case
// (all length-n0 products already stable) returns n0.
template <class S>
long long n_epsilon(const BlindGame<S>&, const ErgodicityCertificate<S>& cert, const S& eps) {
    if (!cert.ergodic())
        throw NotErgodicError("n_epsilon requires an ergodic certificate", cert.counterexample);
    if (!(eps > S(0) && eps < S(1))) throw DomainError("eps must lie strictly inside (0, 1)");
    if (cert.tau_bar == S(0)) return cert.n0;
    if (cert.tau_bar >= S(1)) throw Error("internal: ergodic certificate with tau_bar >= 1");
    long long m = smallest_power_leq(cert.tau_bar, eps);
    return cert.n0 * std::max<long long>(1, m);
}

}  // namespace ergo
