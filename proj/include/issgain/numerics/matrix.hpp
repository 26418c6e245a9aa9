#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "issgain/errors.hpp"

namespace issgain::numerics {

using Vector = std::vector<double>;

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    Vector column(std::size_t j) const {
        Vector out(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            out[i] = (*this)(i, j);
        }
        return out;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix operator*(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.cols() != rhs.rows()) {
        throw DimensionError("matrix product: " + std::to_string(lhs.rows()) + "x" +
                             std::to_string(lhs.cols()) + " times " + std::to_string(rhs.rows()) + "x" +
                             std::to_string(rhs.cols()));
    }
    Matrix out(lhs.rows(), rhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t k = 0; k < lhs.cols(); ++k) {
            const double a = lhs(i, k);
            if (a == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < rhs.cols(); ++j) {
                out(i, j) += a * rhs(k, j);
            }
        }
    }
    return out;
}

inline Matrix operator-(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
        throw DimensionError("matrix difference: shape mismatch");
    }
    Matrix out(lhs.rows(), lhs.cols());
    for (std::size_t i = 0; i < lhs.rows(); ++i) {
        for (std::size_t j = 0; j < lhs.cols(); ++j) {
            out(i, j) = lhs(i, j) - rhs(i, j);
        }
    }
    return out;
}

inline Matrix operator*(Matrix m, double s) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (double& v : m.row(i)) {
            v *= s;
        }
    }
    return m;
}

inline Vector operator*(const Matrix& m, std::span<const double> x) {
    if (m.cols() != x.size()) {
        throw DimensionError("matrix-vector product: width " + std::to_string(m.cols()) + " vs length " +
                             std::to_string(x.size()));
    }
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) {
            acc += r[j] * x[j];
        }
        out[i] = acc;
    }
    return out;
}

inline double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.data()) {
        best = std::max(best, std::abs(v));
    }
    return best;
}

/// Max-abs entrywise difference; shapes must agree.
inline double max_abs_diff(const Matrix& lhs, const Matrix& rhs) {
    if (lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols()) {
        throw DimensionError("max_abs_diff: shape mismatch");
    }
    double best = 0.0;
    for (std::size_t k = 0; k < lhs.data().size(); ++k) {
        best = std::max(best, std::abs(lhs.data()[k] - rhs.data()[k]));
    }
    return best;
}

inline double norm2(std::span<const double> x) {
    double scale = 0.0;
    double ssq = 1.0;
    for (double v : x) {
        if (v == 0.0) {
            continue;
        }
        const double a = std::abs(v);
        if (scale < a) {
            ssq = 1.0 + ssq * (scale / a) * (scale / a);
            scale = a;
        } else {
            ssq += (a / scale) * (a / scale);
        }
    }
    return scale * std::sqrt(ssq);
}

inline double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw DimensionError("dot: length mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i] * y[i];
    }
    return acc;
}

/// Tridiagonal matrix stored by its three bands.
///
/// lower[i] sits at (i+1, i) and upper[i] at (i, i+1).
struct Tridiagonal {
    Vector diag;
    Vector lower;
    Vector upper;

    std::size_t size() const noexcept { return diag.size(); }

    bool is_symmetric() const { return lower == upper; }

    Matrix to_dense() const {
        const std::size_t n = size();
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = diag[i];
            if (i + 1 < n) {
                m(i + 1, i) = lower[i];
                m(i, i + 1) = upper[i];
            }
        }
        return m;
    }

    Vector apply(std::span<const double> x) const {
        const std::size_t n = size();
        if (x.size() != n) {
            throw DimensionError("Tridiagonal::apply: length mismatch");
        }
        Vector y(n);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = diag[i] * x[i];
            if (i > 0) {
                acc += lower[i - 1] * x[i - 1];
            }
            if (i + 1 < n) {
                acc += upper[i] * x[i + 1];
            }
            y[i] = acc;
        }
        return y;
    }

    /// Solves (shift·I - T) y = rhs by the Thomas algorithm.
    ///
    /// Throws DomainError when a pivot vanishes (shift on the spectrum).
    Vector solve_shifted(double shift, std::span<const double> rhs) const {
        const std::size_t n = size();
        if (rhs.size() != n) {
            throw DimensionError("Tridiagonal::solve_shifted: length mismatch");
        }
        Vector c(n, 0.0);
        Vector y(rhs.begin(), rhs.end());
        double pivot = shift - diag[0];
        auto check = [&](double p, std::size_t i) {
            if (p == 0.0 || !std::isfinite(p)) {
                throw DomainError("Tridiagonal::solve_shifted: singular shift " + std::to_string(shift) +
                                  " (zero pivot at row " + std::to_string(i) + ")");
            }
        };
        check(pivot, 0);
        y[0] /= pivot;
        for (std::size_t i = 1; i < n; ++i) {
            c[i - 1] = -upper[i - 1] / pivot;
            pivot = (shift - diag[i]) + lower[i - 1] * c[i - 1];
            check(pivot, i);
            y[i] = (y[i] + lower[i - 1] * y[i - 1]) / pivot;
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            y[i] -= c[i] * y[i + 1];
        }
        return y;
    }

    /// Solves T y = rhs.
    Vector solve(std::span<const double> rhs) const {
        Tridiagonal neg{diag, lower, upper};
        for (auto& v : neg.diag) v = -v;
        for (auto& v : neg.lower) v = -v;
        for (auto& v : neg.upper) v = -v;
        return neg.solve_shifted(0.0, rhs);
    }
};

}  // namespace issgain::numerics
