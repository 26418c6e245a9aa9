#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>

#include "issgain/errors.hpp"
#include "issgain/numerics/matrix.hpp"

namespace issgain::numerics {

/// Norm placed on the input (column) side of an operator.
enum class ColNorm { euclidean, max };

inline std::string_view to_string(ColNorm c) { return c == ColNorm::euclidean ? "euclidean" : "max"; }

inline constexpr std::size_t kMaxCornerColumns = 20;

/// Largest eigenvalue of a small dense symmetric matrix (cyclic Jacobi).
inline double largest_symmetric_eigenvalue(Matrix a) {
    const std::size_t n = a.rows();
    if (n == 0) {
        return 0.0;
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += a(p, q) * a(p, q);
            }
        }
        if (off <= 1e-30 * std::max(1.0, max_abs(a) * max_abs(a))) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) {
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
                const double c = 1.0 / std::hypot(t, 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    double best = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) {
        best = std::max(best, a(i, i));
    }
    return best;
}

/// sup over ‖u‖ ≤ 1 (in `col_norm`) of row_weight·‖m·u‖₂.
///
/// The max-norm case enumerates the corners of the unit cube: u ↦ ‖m·u‖₂ is
/// convex, so the sup sits at an extreme point of the ∞-ball.
inline double weighted_op_norm(const Matrix& m, double row_weight, ColNorm col_norm) {
    if (!(row_weight > 0.0)) {
        throw DomainError("weighted_op_norm: row_weight must be positive");
    }
    const Matrix gram = m.transpose() * m;
    const std::size_t cols = m.cols();
    if (col_norm == ColNorm::euclidean) {
        return row_weight * std::sqrt(std::max(0.0, largest_symmetric_eigenvalue(gram)));
    }
    if (cols > kMaxCornerColumns) {
        throw DimensionError("weighted_op_norm: max-norm needs corner enumeration, " + std::to_string(cols) +
                             " columns exceeds the limit of 20");
    }
    double best = 0.0;
    // Corners u and -u give the same value; fix the sign of the last coordinate.
    const std::size_t corners = cols == 0 ? 1 : (std::size_t{1} << (cols - 1));
    Vector u(cols);
    for (std::size_t mask = 0; mask < corners; ++mask) {
        for (std::size_t j = 0; j < cols; ++j) {
            u[j] = ((mask >> j) & 1U) ? -1.0 : 1.0;
        }
        if (cols > 0) {
            u[cols - 1] = 1.0;
        }
        best = std::max(best, dot(u, gram * std::span<const double>(u)));
    }
    return row_weight * std::sqrt(std::max(0.0, best));
}

}  // namespace issgain::numerics
