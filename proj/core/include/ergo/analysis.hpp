#pragma once

#include <bit>
#include <cstdint>
#include <set>

#include "ergo/errors.hpp"
#include "ergo/matrix.hpp"
#include "ergo/pattern.hpp"

namespace ergo {

// Coefficient of ergodicity: half the largest L1 distance between two rows.
// Zero iff the matrix is stable, < 1 iff it is scrambling.
template <class S>
S tau1(const Matrix<S>& m) {
    require_square(m);
    const int n = m.rows();
    S best(0);
    for (int k = 0; k < n; ++k) {
        for (int kb = k + 1; kb < n; ++kb) {
            S sum(0);
            for (int c = 0; c < n; ++c) {
                S d = m.at(k, c) - m.at(kb, c);
                sum += d < S(0) ? -d : d;
            }
            if (sum > best) best = sum;
        }
    }
    return best / S(2);
}

template <class S>
bool is_stable(const Matrix<S>& m) {
    require_square(m);
    for (int r = 0; r < m.rows(); ++r)
        for (int s = r + 1; s < m.rows(); ++s)
            for (int c = 0; c < m.cols(); ++c)
                if (!num_traits<S>::near_equal(m.at(r, c), m.at(s, c))) return false;
    return true;
}

struct MatrixClassReport {
    bool is_markov = false;
    bool is_scrambling = false;
    bool is_sarymsakov = false;
    bool is_sia = false;
    bool is_stable = false;
};

namespace detail {

inline bool sarymsakov_test(const BooleanPattern& p) {
    const int n = p.size();
    if (n > 20) throw BudgetExceededError("Sarymsakov subset enumeration limited to 20 states");
    const std::uint64_t full = n == 64 ? ~0ull : ((1ull << n) - 1);
    // Ordered pairs of disjoint nonempty subsets; unordered suffices since the
    // condition is symmetric in (Q, Q').
    for (std::uint64_t q = 1; q <= full; ++q) {
        std::uint64_t rest = full & ~q;
        for (std::uint64_t qp = rest; qp; qp = (qp - 1) & rest) {
            if (qp > q) continue;  // each unordered pair once
            std::uint64_t fq = reach_set(p, q);
            std::uint64_t fqp = reach_set(p, qp);
            if ((fq & fqp) != 0) continue;
            if (std::popcount(fq | fqp) > std::popcount(q | qp)) continue;
            return false;
        }
    }
    return true;
}

// A stochastic matrix is SIA iff some power of it is scrambling; the power
// can be bounded by (3^n - 2^(n+1) + 1) / 2. Pattern powers repeat long
// before that on small inputs, so the loop also stops on the first repeat.
inline bool sia_test(const BooleanPattern& p) {
    BooleanPattern power = p;
    std::set<BooleanPattern> seen;
    while (seen.insert(power).second) {
        if (is_scrambling(power)) return true;
        power = pattern_product(power, p);
        if (seen.size() > (1u << 20)) throw BudgetExceededError("SIA power search exceeded budget");
    }
    return false;
}

}  // namespace detail

// Classifies a row-stochastic matrix into the standard ergodicity-related
// classes. Membership in the "products with every SIA matrix stay SIA" class
// is not computed; no finite procedure for it is implemented here.
template <class S>
MatrixClassReport classify(const Matrix<S>& m) {
    require_square(m);
    BooleanPattern p = pattern_of(m);
    MatrixClassReport r;
    r.is_markov = is_markov_pattern(p);
    r.is_scrambling = is_scrambling(p);
    r.is_sarymsakov = detail::sarymsakov_test(p);
    r.is_sia = detail::sia_test(p);
    r.is_stable = is_stable(m);
    return r;
}

// Common row of the column-mean stable approximation.
template <class S>
std::vector<S> column_means(const Matrix<S>& m) {
    require_square(m);
    const int n = m.rows();
    std::vector<S> mean(static_cast<std::size_t>(n), S(0));
    for (int c = 0; c < n; ++c) {
        S sum(0);
        for (int r = 0; r < n; ++r) sum += m.at(r, c);
        mean[static_cast<std::size_t>(c)] = sum / S(n);
    }
    return mean;
}

// Stable approximation: every row of the result is the average of the input
// rows. Stable input is returned unchanged in value.
template <class S>
Matrix<S> stable_approximation(const Matrix<S>& m) {
    std::vector<S> mean = column_means(m);
    const int n = m.rows();
    Matrix<S> out(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) out.at(r, c) = mean[static_cast<std::size_t>(c)];
    return out;
}

}  // namespace ergo
