#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "issgain/errors.hpp"
#include "issgain/numerics/matrix.hpp"

namespace issgain::numerics {

/// Real spectral decomposition A = V diag(λ) Vᵀ of a symmetric matrix.
/// Eigenvalues ascending; column j of `eigenvectors` belongs to eigenvalues[j].
struct EigenDecomposition {
    Vector eigenvalues;
    Matrix eigenvectors;

    std::size_t size() const noexcept { return eigenvalues.size(); }
};

/// Eigenvalues together with a few selected rows of the eigenvector matrix.
///
/// entries(r, j) is component rows[r] of the j-th eigenvector. Enough to
/// evaluate quadratic forms against vectors supported on `rows` in O(n²).
struct SpectralRows {
    Vector eigenvalues;
    std::vector<std::size_t> rows;
    Matrix entries;
};

namespace detail {

// Implicit-shift QL on a symmetric tridiagonal matrix (Wilkinson shift,
// local deflation test). Rotations are accumulated into `work`, whose row j
// tracks the requested components of eigenvector j. Returns the ascending
// permutation of the converged eigenvalues left in `d`.
inline std::vector<std::size_t> tridiag_ql(Vector& d, Vector e, Matrix& work) {
    const std::size_t n = d.size();
    const std::size_t width = work.cols();
    const std::size_t max_iterations = 30 * std::max<std::size_t>(n, 1);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    e.push_back(0.0);
    std::size_t iterations = 0;

    auto rotate = [&](std::size_t i, double s, double c) {
        auto lo = work.row(i);
        auto hi = work.row(i + 1);
        for (std::size_t k = 0; k < width; ++k) {
            const double f = hi[k];
            hi[k] = s * lo[k] + c * f;
            lo[k] = c * lo[k] - s * f;
        }
    };

    for (std::size_t l = 0; l < n; ++l) {
        while (true) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) {
                    break;
                }
            }
            if (m == l) {
                break;
            }
            if (++iterations > max_iterations) {
                throw SolverError("sym_tridiag_eig: no convergence after " + std::to_string(max_iterations) +
                                      " QL iterations",
                                  iterations);
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                const double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate(i, s, c);
            }
            if (underflow) {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Ties keep input order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    return order;
}

inline void check_bands(std::span<const double> diag, std::span<const double> offdiag) {
    if (diag.empty()) {
        throw DimensionError("sym_tridiag_eig: empty diagonal");
    }
    if (offdiag.size() + 1 != diag.size()) {
        throw DimensionError("sym_tridiag_eig: offdiag length " + std::to_string(offdiag.size()) +
                             " must be diag length - 1 = " + std::to_string(diag.size() - 1));
    }
}

}  // namespace detail

/// Full eigendecomposition of the symmetric tridiagonal matrix with the
/// given main diagonal and off-diagonal.
inline EigenDecomposition sym_tridiag_eig(std::span<const double> diag, std::span<const double> offdiag) {
    detail::check_bands(diag, offdiag);
    const std::size_t n = diag.size();
    Vector d(diag.begin(), diag.end());
    Matrix work = Matrix::identity(n);
    const auto order = detail::tridiag_ql(d, Vector(offdiag.begin(), offdiag.end()), work);

    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = d[order[j]];
        const auto src = work.row(order[j]);
        for (std::size_t k = 0; k < n; ++k) {
            out.eigenvectors(k, j) = src[k];
        }
    }
    return out;
}

/// Eigenvalues plus the eigenvector components at `rows`, in O(n² + n·|rows|·iterations).
inline SpectralRows sym_tridiag_eig_rows(std::span<const double> diag, std::span<const double> offdiag,
                                         std::span<const std::size_t> rows) {
    detail::check_bands(diag, offdiag);
    const std::size_t n = diag.size();
    Matrix work(n, rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= n) {
            throw DimensionError("sym_tridiag_eig_rows: row " + std::to_string(rows[r]) + " out of range");
        }
        work(rows[r], r) = 1.0;
    }
    Vector d(diag.begin(), diag.end());
    const auto order = detail::tridiag_ql(d, Vector(offdiag.begin(), offdiag.end()), work);

    SpectralRows out{Vector(n), std::vector<std::size_t>(rows.begin(), rows.end()), Matrix(rows.size(), n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = d[order[j]];
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out.entries(r, j) = work(order[j], r);
        }
    }
    return out;
}

/// Eigenvalues and the eigen-coordinates Vᵀc of each column c of `columns`.
///
/// coefficients(r, j) = <v_j, column r>. Same cost as sym_tridiag_eig_rows
/// with |rows| = columns.cols().
struct SpectralProjection {
    Vector eigenvalues;
    Matrix coefficients;
};

inline SpectralProjection sym_tridiag_project(std::span<const double> diag, std::span<const double> offdiag,
                                              const Matrix& columns) {
    detail::check_bands(diag, offdiag);
    const std::size_t n = diag.size();
    if (columns.rows() != n) {
        throw DimensionError("sym_tridiag_project: " + std::to_string(columns.rows()) + " rows for size " +
                             std::to_string(n));
    }
    Matrix work = columns;
    Vector d(diag.begin(), diag.end());
    const auto order = detail::tridiag_ql(d, Vector(offdiag.begin(), offdiag.end()), work);

    SpectralProjection out{Vector(n), Matrix(columns.cols(), n)};
    for (std::size_t j = 0; j < n; ++j) {
        out.eigenvalues[j] = d[order[j]];
        for (std::size_t r = 0; r < columns.cols(); ++r) {
            out.coefficients(r, j) = work(order[j], r);
        }
    }
    return out;
}

/// Eigenvalues only, ascending.
inline Vector sym_tridiag_eigenvalues(std::span<const double> diag, std::span<const double> offdiag) {
    return sym_tridiag_eig_rows(diag, offdiag, {}).eigenvalues;
}

inline EigenDecomposition sym_tridiag_eig(const Tridiagonal& t) {
    if (!t.is_symmetric()) {
        throw DomainError("sym_tridiag_eig: matrix is not symmetric");
    }
    return sym_tridiag_eig(t.diag, t.lower);
}

}  // namespace issgain::numerics
