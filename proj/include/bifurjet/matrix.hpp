#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace bifurjet {

// Dense row-major matrix of doubles. Jet QUBOs are fully connected, so no
// sparse storage is provided.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix zero(std::size_t n) { return Matrix(n, n); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const double* row(std::size_t i) const { return data_.data() + i * cols_; }
    double* row(std::size_t i) { return data_.data() + i * cols_; }

    const std::vector<double>& data() const { return data_; }

    bool is_square() const { return rows_ == cols_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool is_symmetric(double tol = 0.0) const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

    bool has_zero_diagonal() const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            if ((*this)(i, i) != 0.0) return false;
        return true;
    }

    double max_entry() const {
        double m = -std::numeric_limits<double>::infinity();
        for (double v : data_) m = std::max(m, v);
        return m;
    }

    // RMS over the n(n-1) off-diagonal entries of a square matrix.
    double offdiag_rms() const {
        if (!is_square() || rows_ < 2) return 0.0;
        double sum = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (i != j) sum += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(sum / static_cast<double>(rows_ * (rows_ - 1)));
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace bifurjet
