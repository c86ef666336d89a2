#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "ergo/abstraction.hpp"
#include "ergo/errors.hpp"
#include "ergo/matrix_game.hpp"

namespace ergo {

template <class S>
struct SolveResult {
    std::vector<S> value_per_state;  // v_N = V_N / N per state
    long long horizon = 0;
    S residual{};                    // |v_N - v_{N/2}| at the root
    S root_value{};
};

namespace detail {

// One-shot value of the local stage game at a state. Single-player shapes
// skip the LP: a lone maximizer takes the max, a lone minimizer the min.
template <class S>
S local_game_value(const AbstractGame<S>& g, int x, const std::vector<S>& cont) {
    const int ni = g.num_actions1();
    const int nj = g.num_actions2();
    auto payoff = [&](int a) -> S {
        return g.reward[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)] +
               cont[static_cast<std::size_t>(g.succ[static_cast<std::size_t>(x)][static_cast<std::size_t>(a)])];
    };
    if (nj == 1) {
        S best = payoff(0);
        for (int a = 1; a < ni; ++a) best = std::max(best, payoff(a));
        return best;
    }
    if (ni == 1) {
        S best = payoff(0);
        for (int a = 1; a < nj; ++a) best = std::min(best, payoff(a));
        return best;
    }
    Matrix<S> m(ni, nj);
    for (int i = 0; i < ni; ++i)
        for (int j = 0; j < nj; ++j) m.at(i, j) = payoff(g.pair_index(i, j));
    return matrix_game_value(m).value;
}

}  // namespace detail

// Backward induction on the abstract game: V_t(x) is the optimal total
// reward over t stages, computed with the one-shot value operator at every
// state; the N-stage value is V_N / N. Deterministic given the game and N.
template <class S>
SolveResult<S> shapley_iterate(const AbstractGame<S>& g, long long N) {
    if (N < 1) throw DomainError("horizon must be at least 1");
    const std::size_t ns = g.num_states();
    std::vector<S> prev(ns, S(0)), cur(ns, S(0));
    const long long half = N / 2;
    std::vector<S> half_values;
    for (long long t = 1; t <= N; ++t) {
        for (std::size_t x = 0; x < ns; ++x) cur[x] = detail::local_game_value(g, static_cast<int>(x), prev);
        std::swap(prev, cur);
        if (t == half) half_values = prev;
    }
    SolveResult<S> out;
    out.horizon = N;
    out.value_per_state.resize(ns);
    for (std::size_t x = 0; x < ns; ++x) out.value_per_state[x] = prev[x] / S(N);
    out.root_value = out.value_per_state.at(0);
    if (half >= 1) {
        S vh = half_values.at(0) / S(half);
        S d = out.root_value - vh;
        out.residual = d < S(0) ? -d : d;
    } else {
        out.residual = out.root_value;
    }
    return out;
}

namespace detail {

// Karp's minimum mean cycle on one strongly connected component, exact in
// rational mode. Nodes are indices into `order`; edges are those of the
// abstract game restricted to the component.
template <class S>
std::optional<S> karp_min_mean(const std::vector<int>& comp, const std::vector<int>& local_id,
                               const AbstractGame<S>& g, bool negate) {
    const int h = static_cast<int>(comp.size());
    struct Edge {
        int from, to;
        S w;
    };
    std::vector<Edge> edges;
    for (int u = 0; u < h; ++u) {
        int gu = comp[static_cast<std::size_t>(u)];
        for (int a = 0; a < g.num_pairs(); ++a) {
            int gv = g.succ[static_cast<std::size_t>(gu)][static_cast<std::size_t>(a)];
            if (local_id[static_cast<std::size_t>(gv)] < 0) continue;
            S w = g.reward[static_cast<std::size_t>(gu)][static_cast<std::size_t>(a)];
            edges.push_back({u, local_id[static_cast<std::size_t>(gv)], negate ? -w : w});
        }
    }
    if (edges.empty()) return std::nullopt;

    // D[k][v] = min weight of a walk with exactly k edges ending at v,
    // starting anywhere in the component.
    std::vector<std::vector<S>> d(static_cast<std::size_t>(h + 1),
                                  std::vector<S>(static_cast<std::size_t>(h), S(0)));
    std::vector<std::vector<char>> has(static_cast<std::size_t>(h + 1),
                                       std::vector<char>(static_cast<std::size_t>(h), 0));
    for (int v = 0; v < h; ++v) has[0][static_cast<std::size_t>(v)] = 1;
    for (int k = 1; k <= h; ++k) {
        for (const Edge& e : edges) {
            if (!has[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(e.from)]) continue;
            S cand = d[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(e.from)] + e.w;
            auto& slot = d[static_cast<std::size_t>(k)][static_cast<std::size_t>(e.to)];
            auto& ok = has[static_cast<std::size_t>(k)][static_cast<std::size_t>(e.to)];
            if (!ok || cand < slot) {
                slot = cand;
                ok = 1;
            }
        }
    }

    std::optional<S> best;
    for (int v = 0; v < h; ++v) {
        if (!has[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)]) continue;
        std::optional<S> worst;
        for (int k = 0; k < h; ++k) {
            if (!has[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]) continue;
            S mean = (d[static_cast<std::size_t>(h)][static_cast<std::size_t>(v)] -
                      d[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)]) /
                     S(h - k);
            if (!worst || mean > *worst) worst = mean;
        }
        if (worst && (!best || *worst < *best)) best = worst;
    }
    if (best && negate) *best = -*best;
    return best;
}

}  // namespace detail

// Exact uniform value per state of a single-player abstract game: the payoff
// of the best (max for a lone maximizer, min for a lone minimizer) mean cycle
// reachable from each state. Cycles are scored per strongly connected
// component with Karp's algorithm and propagated over the condensation.
template <class S>
std::vector<S> mean_cycle_value(const AbstractGame<S>& g) {
    const bool maximizer = g.num_actions2() == 1;
    if (!maximizer && g.num_actions1() != 1)
        throw NotSinglePlayerError("mean cycle values need a single-player game");
    const int ns = static_cast<int>(g.num_states());

    // Iterative Tarjan; components come out sinks-first.
    std::vector<int> comp_of(static_cast<std::size_t>(ns), -1);
    std::vector<std::vector<int>> comps;
    {
        std::vector<int> low(static_cast<std::size_t>(ns), 0), disc(static_cast<std::size_t>(ns), -1);
        std::vector<char> on_stack(static_cast<std::size_t>(ns), 0);
        std::vector<int> stack;
        int timer = 0;
        struct Frame {
            int v;
            int edge;
        };
        for (int root = 0; root < ns; ++root) {
            if (disc[static_cast<std::size_t>(root)] != -1) continue;
            std::vector<Frame> call;
            call.push_back({root, 0});
            disc[static_cast<std::size_t>(root)] = low[static_cast<std::size_t>(root)] = timer++;
            stack.push_back(root);
            on_stack[static_cast<std::size_t>(root)] = 1;
            while (!call.empty()) {
                Frame& f = call.back();
                if (f.edge < g.num_pairs()) {
                    int to = g.succ[static_cast<std::size_t>(f.v)][static_cast<std::size_t>(f.edge)];
                    ++f.edge;
                    if (disc[static_cast<std::size_t>(to)] == -1) {
                        disc[static_cast<std::size_t>(to)] = low[static_cast<std::size_t>(to)] = timer++;
                        stack.push_back(to);
                        on_stack[static_cast<std::size_t>(to)] = 1;
                        call.push_back({to, 0});
                    } else if (on_stack[static_cast<std::size_t>(to)]) {
                        low[static_cast<std::size_t>(f.v)] =
                            std::min(low[static_cast<std::size_t>(f.v)], disc[static_cast<std::size_t>(to)]);
                    }
                } else {
                    int v = f.v;
                    call.pop_back();
                    if (!call.empty())
                        low[static_cast<std::size_t>(call.back().v)] =
                            std::min(low[static_cast<std::size_t>(call.back().v)], low[static_cast<std::size_t>(v)]);
                    if (low[static_cast<std::size_t>(v)] == disc[static_cast<std::size_t>(v)]) {
                        std::vector<int> comp;
                        while (true) {
                            int w = stack.back();
                            stack.pop_back();
                            on_stack[static_cast<std::size_t>(w)] = 0;
                            comp_of[static_cast<std::size_t>(w)] = static_cast<int>(comps.size());
                            comp.push_back(w);
                            if (w == v) break;
                        }
                        comps.push_back(std::move(comp));
                    }
                }
            }
        }
    }

    // Mean of the best cycle inside each component, if it has one.
    std::vector<std::optional<S>> own(comps.size());
    std::vector<int> local_id(static_cast<std::size_t>(ns), -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (std::size_t i = 0; i < comps[c].size(); ++i)
            local_id[static_cast<std::size_t>(comps[c][i])] = static_cast<int>(i);
        own[c] = detail::karp_min_mean(comps[c], local_id, g, /*negate=*/maximizer);
        for (int v : comps[c]) local_id[static_cast<std::size_t>(v)] = -1;
    }

    // Components are produced sinks-first, so successors are already final.
    std::vector<std::optional<S>> best(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) {
        best[c] = own[c];
        for (int u : comps[c]) {
            for (int a = 0; a < g.num_pairs(); ++a) {
                int v = g.succ[static_cast<std::size_t>(u)][static_cast<std::size_t>(a)];
                std::size_t vc = static_cast<std::size_t>(comp_of[static_cast<std::size_t>(v)]);
                if (vc == c || !best[vc]) continue;
                if (!best[c] || (maximizer ? *best[vc] > *best[c] : *best[vc] < *best[c]))
                    best[c] = best[vc];
            }
        }
    }

    std::vector<S> out(static_cast<std::size_t>(ns), S(0));
    for (int v = 0; v < ns; ++v) {
        const auto& b = best[static_cast<std::size_t>(comp_of[static_cast<std::size_t>(v)])];
        if (!b) throw Error("internal: state with no reachable cycle in a total game graph");
        out[static_cast<std::size_t>(v)] = *b;
    }
    return out;
}

template <class S>
struct SolverParams {
    S tol = S(1) / S(10000);   // doubling stops when |v_N - v_2N| <= tol
    long long n_max = 1 << 20; // horizon cap for the doubling scheme
    long long n_start = 16;
};

template <class S>
struct ValueReport {
    ErgodicityCertificate<S> cert;
    long long n_eps = 0;
    std::size_t abstract_states = 0;
    std::size_t num_beliefs = 0;
    bool single_player = false;
    S root_value{};
    S guarantee_radius{};  // 4 * eps; solver residual reported separately
    S residual{};
    long long horizon = 0;  // 0 for the exact single-player path
};

// End-to-end approximation pipeline: ergodicity certificate, block length,
// abstract game, then either the exact mean-cycle value (single player) or
// horizon-doubling backward induction until the root residual falls under
// params.tol. The residual is a reported diagnostic, not a proven bound.
template <class S>
ValueReport<S> approximate_uniform_value(const BlindGame<S>& game, const Belief<S>& b1, const S& eps,
                                         const SolverParams<S>& params = {},
                                         const SearchBudget& budget = {}, int threads = 1) {
    validate_game(game);
    ValueReport<S> report;
    report.cert = verify_ergodic(game, budget, threads);
    if (!report.cert.ergodic())
        throw NotErgodicError("the game is not ergodic", report.cert.counterexample);
    report.n_eps = n_epsilon(game, report.cert, eps);
    AbstractGame<S> abstract = build_abstract_game(game, b1, eps, report.cert, budget);
    report.abstract_states = abstract.num_states();
    report.num_beliefs = abstract.beliefs.size();
    report.guarantee_radius = S(4) * eps;
    report.single_player = abstract.num_actions1() == 1 || abstract.num_actions2() == 1;

    if (report.single_player) {
        report.root_value = mean_cycle_value(abstract).at(0);
        report.residual = S(0);
        report.horizon = 0;
        return report;
    }

    long long n = std::max<long long>(1, params.n_start);
    SolveResult<S> sol = shapley_iterate(abstract, std::min(2 * n, params.n_max));
    while (sol.residual > params.tol && sol.horizon < params.n_max) {
        n = sol.horizon;
        sol = shapley_iterate(abstract, std::min(2 * n, params.n_max));
    }
    report.root_value = sol.root_value;
    report.residual = sol.residual;
    report.horizon = sol.horizon;
    return report;
}

}  // namespace ergo
