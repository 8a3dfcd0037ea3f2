#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "arl/common.hpp"

namespace arl {

/// Dense row-major matrix of doubles. Deliberately minimal: the training
/// code only needs the three GEMM variants below plus row access.
class dense_matrix {
public:
    dense_matrix() = default;
    dense_matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static dense_matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return {};
        dense_matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                throw shape_error("from_rows: ragged input at row " + std::to_string(i));
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }

    double& operator()(std::size_t r, std::size_t c) { return v_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return v_[r * cols_ + c]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(v_.data() + r * cols_, cols_);
    }
    std::span<double> row(std::size_t r) {
        return std::span<double>(v_.data() + r * cols_, cols_);
    }

    bool all_finite() const { return arl::all_finite(v_); }

    void fill(double x) { v_.assign(v_.size(), x); }

    /// New matrix holding the given rows, in the given order (duplicates allowed).
    dense_matrix take_rows(const std::vector<std::size_t>& idx) const {
        dense_matrix out(idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const double* src = v_.data() + idx[i] * cols_;
            double* dst = out.v_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) dst[j] = src[j];
        }
        return out;
    }

    bool operator==(const dense_matrix&) const = default;

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

// C = A * B, accumulating row-wise (i-k-j order keeps the inner loop contiguous).
inline dense_matrix matmul(const dense_matrix& a, const dense_matrix& b) {
    if (a.cols() != b.rows())
        throw shape_error("matmul: inner dimensions " + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()));
    dense_matrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.data() + i * k;
        double* crow = c.data() + i * m;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            const double* brow = b.data() + kk * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

// C = A^T * B  (A: n x r, B: n x m, C: r x m)
inline dense_matrix matmul_at_b(const dense_matrix& a, const dense_matrix& b) {
    if (a.rows() != b.rows())
        throw shape_error("matmul_at_b: row counts " + std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()));
    dense_matrix c(a.cols(), b.cols());
    const std::size_t n = a.rows(), r = a.cols(), m = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.data() + i * r;
        const double* brow = b.data() + i * m;
        for (std::size_t kk = 0; kk < r; ++kk) {
            const double av = arow[kk];
            if (av == 0.0) continue;
            double* crow = c.data() + kk * m;
            for (std::size_t j = 0; j < m; ++j) crow[j] += av * brow[j];
        }
    }
    return c;
}

// C = A * B^T  (A: n x m, B: r x m, C: n x r)
inline dense_matrix matmul_a_bt(const dense_matrix& a, const dense_matrix& b) {
    if (a.cols() != b.cols())
        throw shape_error("matmul_a_bt: column counts " + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.cols()));
    dense_matrix c(a.rows(), b.rows());
    const std::size_t n = a.rows(), m = a.cols(), r = b.rows();
    for (std::size_t i = 0; i < n; ++i) {
        const double* arow = a.data() + i * m;
        double* crow = c.data() + i * r;
        for (std::size_t kk = 0; kk < r; ++kk) {
            const double* brow = b.data() + kk * m;
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) s += arow[j] * brow[j];
            crow[kk] = s;
        }
    }
    return c;
}

} // namespace arl
