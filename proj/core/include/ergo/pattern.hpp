#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "ergo/errors.hpp"
#include "ergo/matrix.hpp"
#include "ergo/numeric.hpp"

namespace ergo {

// Boolean support of a stochastic matrix: bit (k, k') is set iff the entry is
// strictly positive. Sign decisions on patterns are exact, which is what lets
// the ergodicity search avoid floating point entirely. One 64-bit word per
// row caps the state count at 64.
class BooleanPattern {
  public:
    BooleanPattern() : n_(0) {}
    explicit BooleanPattern(int n) : n_(n), rows_(static_cast<std::size_t>(n), 0) {
        if (n < 0 || n > 64) throw ShapeError("pattern supports 1..64 states");
    }

    static BooleanPattern identity(int n) {
        BooleanPattern p(n);
        for (int k = 0; k < n; ++k) p.rows_[static_cast<std::size_t>(k)] = 1ull << k;
        return p;
    }

    int size() const { return n_; }
    bool get(int r, int c) const { return (rows_[static_cast<std::size_t>(r)] >> c) & 1u; }
    void set(int r, int c) { rows_[static_cast<std::size_t>(r)] |= 1ull << c; }
    void set_row_bits(int r, std::uint64_t bits) { rows_[static_cast<std::size_t>(r)] = bits; }
    std::uint64_t row_bits(int r) const { return rows_[static_cast<std::size_t>(r)]; }

    const std::vector<std::uint64_t>& rows() const { return rows_; }

    bool operator==(const BooleanPattern& o) const { return n_ == o.n_ && rows_ == o.rows_; }
    bool operator<(const BooleanPattern& o) const {
        if (n_ != o.n_) return n_ < o.n_;
        return rows_ < o.rows_;
    }

  private:
    int n_;
    std::vector<std::uint64_t> rows_;
};

template <class S>
BooleanPattern pattern_of(const Matrix<S>& m) {
    require_square(m);
    if (m.rows() > 64) throw ShapeError("pattern supports 1..64 states");
    BooleanPattern p(m.rows());
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (num_traits<S>::is_positive(m.at(r, c))) p.set(r, c);
    return p;
}

// Boolean matrix product (OR of ANDs): mirrors the support of the numeric
// product of nonnegative matrices.
inline BooleanPattern pattern_product(const BooleanPattern& a, const BooleanPattern& b) {
    if (a.size() != b.size()) throw ShapeError("pattern product shape mismatch");
    BooleanPattern out(a.size());
    for (int r = 0; r < a.size(); ++r) {
        std::uint64_t bits = a.row_bits(r);
        std::uint64_t acc = 0;
        while (bits) {
            int k = std::countr_zero(bits);
            bits &= bits - 1;
            acc |= b.row_bits(k);
        }
        out.set_row_bits(r, acc);
    }
    return out;
}

// F_P(Q): all states reachable from the subset Q in one step. Subsets are
// bitmasks over the state indices.
inline std::uint64_t reach_set(const BooleanPattern& p, std::uint64_t q) {
    std::uint64_t out = 0;
    std::uint64_t bits = q;
    while (bits) {
        int k = std::countr_zero(bits);
        bits &= bits - 1;
        if (k >= p.size()) throw ShapeError("subset contains a state outside the pattern");
        out |= p.row_bits(k);
    }
    return out;
}

// Every pair of rows shares a positive column.
inline bool is_scrambling(const BooleanPattern& p) {
    for (int r = 0; r < p.size(); ++r)
        for (int s = r + 1; s < p.size(); ++s)
            if ((p.row_bits(r) & p.row_bits(s)) == 0) return false;
    return true;
}

// Some column is positive in every row.
inline bool is_markov_pattern(const BooleanPattern& p) {
    if (p.size() == 0) return false;
    std::uint64_t common = ~0ull;
    for (int r = 0; r < p.size(); ++r) common &= p.row_bits(r);
    std::uint64_t mask = p.size() == 64 ? ~0ull : ((1ull << p.size()) - 1);
    return (common & mask) != 0;
}

inline bool has_empty_row(const BooleanPattern& p) {
    for (int r = 0; r < p.size(); ++r)
        if (p.row_bits(r) == 0) return true;
    return false;
}

}  // namespace ergo
