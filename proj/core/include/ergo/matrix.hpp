#pragma once

#include <vector>

#include "ergo/errors.hpp"
#include "ergo/numeric.hpp"

namespace ergo {

// Dense row-major matrix over the active scalar type. Row-stochasticity is
// not enforced here; game validation does that at the boundary.
template <class S>
class Matrix {
  public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, S(0)) {
        if (rows < 0 || cols < 0) throw ShapeError("negative matrix dimension");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int k = 0; k < n; ++k) m.at(k, k) = S(1);
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    S& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const S& at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    const std::vector<S>& data() const { return data_; }
    std::vector<S>& data() { return data_; }

    Matrix multiply(const Matrix& rhs) const {
        if (cols_ != rhs.rows_)
            throw ShapeError("matrix product shape mismatch: " + std::to_string(cols_) + " vs " +
                             std::to_string(rhs.rows_));
        Matrix out(rows_, rhs.cols_);
        for (int r = 0; r < rows_; ++r) {
            for (int k = 0; k < cols_; ++k) {
                const S& a = at(r, k);
                if (a == S(0)) continue;
                for (int c = 0; c < rhs.cols_; ++c) out.at(r, c) += a * rhs.at(k, c);
            }
        }
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) { return a.multiply(b); }

    bool operator==(const Matrix& rhs) const {
        return rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
    }
    bool operator!=(const Matrix& rhs) const { return !(*this == rhs); }

    // Lexicographic order, used as a deterministic key in product-set maps.
    bool operator<(const Matrix& rhs) const {
        if (rows_ != rhs.rows_) return rows_ < rhs.rows_;
        if (cols_ != rhs.cols_) return cols_ < rhs.cols_;
        return data_ < rhs.data_;
    }

  private:
    int rows_, cols_;
    std::vector<S> data_;
};

// Left action of a row vector: (v^T M) as a vector.
template <class S>
std::vector<S> row_times_matrix(const std::vector<S>& v, const Matrix<S>& m) {
    if (static_cast<int>(v.size()) != m.rows()) throw ShapeError("vector/matrix shape mismatch");
    std::vector<S> out(static_cast<std::size_t>(m.cols()), S(0));
    for (int r = 0; r < m.rows(); ++r) {
        const S& w = v[static_cast<std::size_t>(r)];
        if (w == S(0)) continue;
        for (int c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] += w * m.at(r, c);
    }
    return out;
}

template <class S>
bool is_row_stochastic(const Matrix<S>& m) {
    if (m.rows() != m.cols()) return false;
    for (int r = 0; r < m.rows(); ++r) {
        S sum(0);
        for (int c = 0; c < m.cols(); ++c) {
            if (m.at(r, c) < S(0)) return false;
            sum += m.at(r, c);
        }
        if (!num_traits<S>::row_sum_ok(sum)) return false;
    }
    return true;
}

template <class S>
void require_square(const Matrix<S>& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw ShapeError("expected a nonempty square matrix, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
}

}  // namespace ergo
