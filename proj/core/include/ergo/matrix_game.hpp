#pragma once

#include <cmath>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/matrix.hpp"
#include "ergo/numeric.hpp"

namespace ergo {

template <class S>
struct MatrixGameSolution {
    S value{};
    std::vector<S> row_strategy;  // optimal mixed strategy of the maximizer
    std::vector<S> col_strategy;  // optimal mixed strategy of the minimizer
};

namespace detail {

template <class S>
bool simplex_positive(const S& x) {
    if constexpr (num_traits<S>::exact)
        return x > S(0);
    else
        return x > 1e-11;
}

}  // namespace detail

// Value and optimal mixed strategies of a zero-sum matrix game (row player
// maximizes), via the standard value LP: shift the payoffs positive, solve
//   max 1'y  s.t.  G y <= 1, y >= 0
// with a dense primal simplex using Bland's anti-cycling rule, and read the
// row strategy off the duals. The slack basis is feasible, so no phase-1 is
// needed, and with rational scalars every pivot is exact.
template <class S>
MatrixGameSolution<S> matrix_game_value(const Matrix<S>& payoff) {
    const int m = payoff.rows();  // maximizer actions
    const int n = payoff.cols();  // minimizer actions
    if (m == 0 || n == 0) throw DegenerateInputError("matrix game has an empty action set");
    if constexpr (!num_traits<S>::exact) {
        for (const double& x : payoff.data())
            if (!std::isfinite(x)) throw DomainError("matrix game payoff is not finite");
    }

    S shift(0);
    {
        S least = payoff.at(0, 0);
        for (const S& x : payoff.data())
            if (x < least) least = x;
        shift = S(1) - least;
    }

    // Tableau: n structural columns, m slack columns, rhs.
    const int cols = n + m;
    std::vector<std::vector<S>> t(static_cast<std::size_t>(m),
                                  std::vector<S>(static_cast<std::size_t>(cols + 1), S(0)));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) t[i][j] = payoff.at(i, j) + shift;
        t[i][static_cast<std::size_t>(n + i)] = S(1);
        t[i][static_cast<std::size_t>(cols)] = S(1);
    }
    // gain[j] = c_j - z_j; entering while some gain is positive.
    std::vector<S> gain(static_cast<std::size_t>(cols + 1), S(0));
    for (int j = 0; j < n; ++j) gain[static_cast<std::size_t>(j)] = S(1);
    std::vector<int> basis(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) basis[static_cast<std::size_t>(i)] = n + i;

    const long long max_pivots = 2000ll * (m + n) * (m + n) + 10000;
    for (long long pivots = 0;; ++pivots) {
        if (pivots > max_pivots) throw Error("simplex failed to converge (pivot limit)");
        int enter = -1;
        for (int j = 0; j < cols; ++j) {
            if (detail::simplex_positive(gain[static_cast<std::size_t>(j)])) {
                enter = j;  // Bland: lowest-index improving column
                break;
            }
        }
        if (enter < 0) break;

        int leave = -1;
        S best_ratio(0);
        for (int i = 0; i < m; ++i) {
            const S& a = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
            if (!detail::simplex_positive(a)) continue;
            S ratio = t[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols)] / a;
            if (leave < 0 || ratio < best_ratio ||
                (ratio == best_ratio &&
                 basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) throw Error("simplex detected an unbounded value LP");

        auto& prow = t[static_cast<std::size_t>(leave)];
        const S pivot = prow[static_cast<std::size_t>(enter)];
        for (S& x : prow) x /= pivot;
        for (int i = 0; i < m; ++i) {
            if (i == leave) continue;
            auto& row = t[static_cast<std::size_t>(i)];
            const S f = row[static_cast<std::size_t>(enter)];
            if (f == S(0)) continue;
            for (int j = 0; j <= cols; ++j)
                row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
        }
        {
            const S f = gain[static_cast<std::size_t>(enter)];
            for (int j = 0; j <= cols; ++j)
                gain[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
        }
        basis[static_cast<std::size_t>(leave)] = enter;
    }

    // Objective value 1'y = 1 / val(shifted game).
    S total = -gain[static_cast<std::size_t>(cols)];
    if (!(total > S(0))) throw Error("simplex produced a nonpositive objective");
    S shifted_value = S(1) / total;

    MatrixGameSolution<S> sol;
    sol.value = shifted_value - shift;
    sol.col_strategy.assign(static_cast<std::size_t>(n), S(0));
    for (int i = 0; i < m; ++i)
        if (basis[static_cast<std::size_t>(i)] < n)
            sol.col_strategy[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] =
                t[static_cast<std::size_t>(i)][static_cast<std::size_t>(cols)] * shifted_value;
    sol.row_strategy.assign(static_cast<std::size_t>(m), S(0));
    for (int i = 0; i < m; ++i)
        sol.row_strategy[static_cast<std::size_t>(i)] = -gain[static_cast<std::size_t>(n + i)] * shifted_value;

    auto tidy = [](std::vector<S>& dist) {
        S sum(0);
        for (S& x : dist) {
            if (x < S(0)) x = S(0);
            sum += x;
        }
        if (sum > S(0))
            for (S& x : dist) x /= sum;
    };
    tidy(sol.row_strategy);
    tidy(sol.col_strategy);
    return sol;
}

}  // namespace ergo
