#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "issgain/errors.hpp"
#include "issgain/numerics.hpp"

namespace issgain {

using numerics::ColNorm;
using numerics::Matrix;
using numerics::Tridiagonal;
using numerics::Vector;

/// Scalar function on [0, 1].
using Profile = std::function<double(double)>;

/// Uniform partition of [0, 1] into n intervals.
struct GridSpec {
    std::size_t n = 2;
    double length = 1.0;
    double dx = 0.5;

    std::size_t interior_nodes() const noexcept { return n - 1; }
    /// Node ξ_k = k/n, k = 0..n.
    double node(std::size_t k) const noexcept { return static_cast<double>(k) / static_cast<double>(n); }
};

inline GridSpec make_grid(std::size_t n) {
    if (n < 2) {
        throw DomainError("grid: need at least 2 intervals, got " + std::to_string(n));
    }
    return {n, 1.0, 1.0 / static_cast<double>(n)};
}

struct SpaceConfig {
    /// State norm is ‖x‖² = dx^p Σ x_k². p = 1 is the L²-consistent Riemann
    /// weight; p = 2 is the heavier dx² weight used for the sweep.
    double weight_exponent = 1.0;
    ColNorm input_norm = ColNorm::max;
};

struct WeightedSpace {
    GridSpec grid;
    double weight_exponent = 1.0;
    ColNorm input_norm = ColNorm::max;

    /// Factor multiplying the Euclidean norm: dx^{p/2}.
    double weight() const { return std::pow(grid.dx, 0.5 * weight_exponent); }
};

inline WeightedSpace make_space(std::size_t n, const SpaceConfig& cfg) {
    if (cfg.weight_exponent != 1.0 && cfg.weight_exponent != 2.0) {
        throw DomainError("space: weight exponent must be 1 or 2, got " + std::to_string(cfg.weight_exponent));
    }
    return {make_grid(n), cfg.weight_exponent, cfg.input_norm};
}

/// ẋ = A x + B u on the interior nodes, U = ℝ² (left, right boundary value).
struct ClosedControlSystem {
    WeightedSpace space;
    Tridiagonal a_matrix;
    Matrix b_matrix;
    double diffusion = 1.0;

    std::size_t dim() const noexcept { return a_matrix.size(); }
};

/// Discretization that still carries the boundary nodes, before closure.
///
/// Shapes for n intervals: ainit (n-1)x(n+1), bop 2x(n+1), q (n-1)x(n+1),
/// restrict (n-1)x(n+1), bop_rinv (n+1)x2.
struct PreClosureSystem {
    GridSpec grid;
    double diffusion = 1.0;
    Matrix ainit;
    Matrix bop;
    Matrix q;
    Matrix restrict;
    Matrix bop_rinv;
};

inline void check_diffusion(double a) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("diffusion coefficient must be positive, got " + std::to_string(a));
    }
}

/// Second-difference Dirichlet heat system, A = a n² tridiag(1,-2,1),
/// B = a n² [e₁ e_{n-1}].
inline ClosedControlSystem build_heat_dirichlet(std::size_t n, double a, const SpaceConfig& cfg = {}) {
    check_diffusion(a);
    auto space = make_space(n, cfg);
    const std::size_t m = n - 1;
    const double scale = a * static_cast<double>(n) * static_cast<double>(n);
    Tridiagonal t{Vector(m, -2.0 * scale), Vector(m - 1, scale), Vector(m - 1, scale)};
    Matrix b(m, 2);
    b(0, 0) = scale;
    b(m - 1, 1) = scale;
    return {space, std::move(t), std::move(b), a};
}

inline PreClosureSystem build_preclosure_heat(std::size_t n, double a) {
    check_diffusion(a);
    const auto grid = make_grid(n);
    const std::size_t m = n - 1;
    const std::size_t full = n + 1;
    const double scale = a * static_cast<double>(n) * static_cast<double>(n);

    Matrix ainit(m, full);
    Matrix q(m, full);
    for (std::size_t k = 0; k < m; ++k) {
        ainit(k, k) = scale;
        ainit(k, k + 1) = -2.0 * scale;
        ainit(k, k + 2) = scale;
        q(k, k + 1) = 1.0;
    }
    Matrix bop(2, full);
    bop(0, 0) = 1.0;
    bop(1, n) = 1.0;
    // Column 0 is the left-boundary profile 1-ξ, column 1 the right one ξ.
    Matrix rinv(full, 2);
    for (std::size_t k = 0; k <= n; ++k) {
        rinv(k, 0) = static_cast<double>(n - k) / static_cast<double>(n);
        rinv(k, 1) = static_cast<double>(k) / static_cast<double>(n);
    }
    Matrix restrict = q;
    return {grid, a, std::move(ainit), std::move(bop), std::move(q), std::move(restrict), std::move(rinv)};
}

/// dx^{p/2}·‖x‖₂.
inline double weighted_state_norm(std::span<const double> x, const WeightedSpace& space) {
    if (x.size() != space.grid.interior_nodes()) {
        throw DimensionError("weighted_state_norm: length " + std::to_string(x.size()) + " but space has " +
                             std::to_string(space.grid.interior_nodes()) + " interior nodes");
    }
    return space.weight() * numerics::norm2(x);
}

/// Continuous piecewise-linear function on the uniform grid, given by its
/// n+1 nodal values.
class PiecewiseLinear {
public:
    PiecewiseLinear(GridSpec grid, Vector nodal) : grid_(grid), nodal_(std::move(nodal)) {
        if (nodal_.size() != grid_.n + 1) {
            throw DimensionError("PiecewiseLinear: need n+1 nodal values");
        }
    }

    double operator()(double xi) const {
        if (xi <= 0.0) {
            return nodal_.front();
        }
        if (xi >= 1.0) {
            return nodal_.back();
        }
        const double pos = xi * static_cast<double>(grid_.n);
        const double nearest = std::round(pos);
        if (std::abs(pos - nearest) <= 4.0 * std::numeric_limits<double>::epsilon() * nearest) {
            return nodal_[static_cast<std::size_t>(nearest)];
        }
        auto cell = static_cast<std::size_t>(pos);
        if (cell >= grid_.n) {
            cell = grid_.n - 1;
        }
        const double frac = pos - static_cast<double>(cell);
        return (1.0 - frac) * nodal_[cell] + frac * nodal_[cell + 1];
    }

    const GridSpec& grid() const noexcept { return grid_; }
    const Vector& nodal() const noexcept { return nodal_; }

private:
    GridSpec grid_;
    Vector nodal_;
};

namespace detail {

inline constexpr std::array<double, 5> kGaussLegendreNodes = {
    -0.906179845938663992797626878299393, -0.538469310105683091036314420700208, 0.0,
    0.538469310105683091036314420700208,  0.906179845938663992797626878299393,
};
inline constexpr std::array<double, 5> kGaussLegendreWeights = {
    0.236926885056189087514264040719918, 0.478628670499366468041291514835638,
    0.568888888888888888888888888888889, 0.478628670499366468041291514835638,
    0.236926885056189087514264040719918,
};

}  // namespace detail

/// ‖f‖_{L²(0,1)} by 5-point Gauss-Legendre on `cells` equal cells.
inline double l2_norm(const Profile& f, std::size_t cells = 2048) {
    const double h = 1.0 / static_cast<double>(cells);
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double mid = (static_cast<double>(c) + 0.5) * h;
        for (std::size_t q = 0; q < 5; ++q) {
            const double v = f(mid + 0.5 * h * detail::kGaussLegendreNodes[q]);
            acc += 0.5 * h * detail::kGaussLegendreWeights[q] * v * v;
        }
    }
    return std::sqrt(acc);
}

/// ‖g - f‖_{L²(0,1)} for a piecewise-linear g, integrating cell by cell on
/// g's grid (refined `sub` times) so kinks fall on cell boundaries.
inline double l2_distance(const PiecewiseLinear& g, const Profile& f, std::size_t sub = 4) {
    const std::size_t cells = g.grid().n * sub;
    return l2_norm([&](double xi) { return g(xi) - f(xi); }, cells);
}

/// Sampling P_n and hat-function extension E_n, with the uniform operator
/// norm bounds μ_p, μ_e.
struct ApproximationPair {
    GridSpec grid;
    double mu_p = 1.0;
    double mu_e = 1.0;

    /// (P_n f)_k = f(ξ_k), k = 1..n-1.
    Vector restrict(const Profile& f) const {
        Vector out(grid.interior_nodes());
        for (std::size_t k = 1; k < grid.n; ++k) {
            out[k - 1] = f(grid.node(k));
        }
        return out;
    }

    /// E_n x = Σ x_k B_{n,k}; vanishes at both endpoints.
    PiecewiseLinear extend(std::span<const double> x) const {
        if (x.size() != grid.interior_nodes()) {
            throw DimensionError("extend: length " + std::to_string(x.size()) + " but grid has " +
                                 std::to_string(grid.interior_nodes()) + " interior nodes");
        }
        Vector nodal(grid.n + 1, 0.0);
        std::copy(x.begin(), x.end(), nodal.begin() + 1);
        return {grid, std::move(nodal)};
    }

    /// Ẽ_n on the n+1 nodes including the boundary.
    PiecewiseLinear extend_full(std::span<const double> x) const {
        return {grid, Vector(x.begin(), x.end())};
    }
};

inline ApproximationPair make_pair(std::size_t n, double mu_p = 1.0, double mu_e = 1.0) {
    return {make_grid(n), mu_p, mu_e};
}

struct SineMode {
    int k = 1;
    double c = 1.0;
};

/// ξ ↦ Σ c_k e^{-a k²π² t} sin(kπξ), the exact homogeneous solution.
inline Profile analytic_heat_state(std::vector<SineMode> modes, double a, double t) {
    if (t < 0.0) {
        throw DomainError("analytic_heat_state: t must be nonnegative");
    }
    for (auto& mode : modes) {
        const double k = static_cast<double>(mode.k);
        mode.c *= std::exp(-a * k * k * std::numbers::pi * std::numbers::pi * t);
    }
    return [modes = std::move(modes)](double xi) {
        double acc = 0.0;
        for (const auto& mode : modes) {
            acc += mode.c * std::sin(static_cast<double>(mode.k) * std::numbers::pi * xi);
        }
        return acc;
    };
}

/// k-th discrete sine vector sin(kπ j/n), j = 1..n-1; an exact eigenvector
/// of the Dirichlet second difference with eigenvalue -4an² sin²(kπ/2n).
inline Vector discrete_sine_vector(std::size_t n, int k) {
    Vector v(n - 1);
    for (std::size_t j = 1; j < n; ++j) {
        v[j - 1] = std::sin(static_cast<double>(k) * std::numbers::pi * static_cast<double>(j) /
                            static_cast<double>(n));
    }
    return v;
}

inline double heat_eigenvalue(std::size_t n, double a, int k) {
    const double nn = static_cast<double>(n);
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * nn));
    return -4.0 * a * nn * nn * s * s;
}

}  // namespace issgain
