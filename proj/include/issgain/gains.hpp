#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "issgain/diagnostics.hpp"
#include "issgain/errors.hpp"
#include "issgain/numerics.hpp"
#include "issgain/systems.hpp"

namespace issgain {

/// Log-spaced sample of the positive real ray used for resolvent suprema.
struct PathSpec {
    std::vector<double> lambda_grid;

    double lambda_min() const { return lambda_grid.front(); }
    double lambda_max() const { return lambda_grid.back(); }
    std::size_t count() const noexcept { return lambda_grid.size(); }
};

inline PathSpec make_log_path(double lambda_min, double lambda_max, std::size_t count) {
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || count < 2) {
        throw DomainError("path: need 0 < lambda_min < lambda_max and count >= 2");
    }
    PathSpec path;
    path.lambda_grid.resize(count);
    const double lo = std::log(lambda_min);
    const double step = (std::log(lambda_max) - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        path.lambda_grid[i] = std::exp(lo + step * static_cast<double>(i));
    }
    // Endpoints exact, so the truncation point is the configured one.
    path.lambda_grid.front() = lambda_min;
    path.lambda_grid.back() = lambda_max;
    return path;
}

inline PathSpec default_path() { return make_log_path(1e-4, 1e4, 400); }

/// ‖S(t)‖ ≤ m·e^{-omega·t}.
struct GrowthBound {
    double m = 1.0;
    double omega = 0.0;
};

/// ‖R(λ, A)‖ ≤ d/(λ+1) on the sampled ray; sector angle 0 for self-adjoint
/// negative-definite generators.
struct SectorBound {
    double d = 1.0;
    double sector_angle = 0.0;
    double lambda_max_used = 0.0;
};

/// Eigenvalues of A together with the eigenvector components at the rows
/// where B is nonzero.
struct SystemSpectrum {
    numerics::SpectralRows rows;

    /// μ_min = smallest eigenvalue of -A.
    double mu_min() const { return -rows.eigenvalues.back(); }
};

inline std::vector<std::size_t> input_support(const Matrix& b) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            if (b(i, j) != 0.0) {
                support.push_back(i);
                break;
            }
        }
    }
    return support;
}

/// Requires a symmetric system; throws StabilityError unless every
/// eigenvalue is strictly negative.
inline SystemSpectrum system_spectrum(const ClosedControlSystem& sys) {
    if (!sys.a_matrix.is_symmetric()) {
        throw DomainError("system_spectrum: A is not symmetric");
    }
    const auto support = input_support(sys.b_matrix);
    SystemSpectrum spec{numerics::sym_tridiag_eig_rows(sys.a_matrix.diag, sys.a_matrix.lower, support)};
    const double top = spec.rows.eigenvalues.back();
    if (!(top < 0.0)) {
        throw StabilityError("system with n = " + std::to_string(sys.space.grid.n) +
                             " is not Hurwitz (largest eigenvalue " + format_real(top) + ")");
    }
    return spec;
}

namespace detail {

// Scaling-and-squaring Taylor exponential for small dense matrices.
inline Matrix expm_dense(const Matrix& a) {
    const std::size_t n = a.rows();
    double norm1 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            col += std::abs(a(i, j));
        }
        norm1 = std::max(norm1, col);
    }
    int squarings = 0;
    double scale = 1.0;
    while (norm1 * scale > 0.5) {
        scale *= 0.5;
        ++squarings;
    }
    const Matrix scaled = a * scale;
    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 20; ++k) {
        term = term * scaled;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                term(i, j) /= static_cast<double>(k);
                result(i, j) += term(i, j);
            }
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    return result;
}

inline double spectral_norm(const Matrix& m) {
    return std::sqrt(std::max(0.0, numerics::largest_symmetric_eigenvalue(m.transpose() * m)));
}

inline constexpr std::size_t kGenericGrowthMaxDim = 200;

// Tridiagonal A with lower[i]·upper[i] > 0 is diagonally similar to the
// symmetric matrix with off-diagonal sign·sqrt(lower·upper); M is sampled
// on a t-grid since the similarity is not orthogonal.
inline GrowthBound generic_growth_bound(const ClosedControlSystem& sys) {
    const auto& t = sys.a_matrix;
    if (t.size() > kGenericGrowthMaxDim) {
        throw DomainError("growth_bound: non-symmetric fallback limited to dimension 200");
    }
    Vector off(t.lower.size());
    for (std::size_t i = 0; i < off.size(); ++i) {
        const double prod = t.lower[i] * t.upper[i];
        if (!(prod > 0.0)) {
            throw DomainError("growth_bound: non-symmetric fallback needs lower·upper > 0 on every band entry");
        }
        off[i] = std::copysign(std::sqrt(prod), t.lower[i]);
    }
    const auto eig = numerics::sym_tridiag_eigenvalues(t.diag, off);
    const double top = eig.back();
    if (!(top < 0.0)) {
        throw StabilityError("growth_bound: system is not Hurwitz (spectral abscissa " + format_real(top) + ")");
    }
    const double omega = -top;
    const Matrix dense = t.to_dense();
    double m = 1.0;
    const auto grid = make_log_path(1e-4, 10.0 / omega, 200).lambda_grid;
    for (double time : grid) {
        m = std::max(m, spectral_norm(expm_dense(dense * time)) * std::exp(omega * time));
    }
    return {m, omega};
}

}  // namespace detail

inline GrowthBound growth_bound(const SystemSpectrum& spec) { return {1.0, spec.mu_min()}; }

/// Type (M_n, ω_n) of the semigroup generated by A_n. Symmetric systems
/// give M = 1 and ω = -(largest eigenvalue).
inline GrowthBound growth_bound(const ClosedControlSystem& sys) {
    if (!sys.a_matrix.is_symmetric()) {
        return detail::generic_growth_bound(sys);
    }
    const double top = numerics::sym_tridiag_eigenvalues(sys.a_matrix.diag, sys.a_matrix.lower).back();
    if (!(top < 0.0)) {
        throw StabilityError("growth_bound: system with n = " + std::to_string(sys.space.grid.n) +
                             " is not Hurwitz (largest eigenvalue " + format_real(top) + ")");
    }
    return {1.0, -top};
}

/// sup over the path of (λ+1)/(λ+μ_min).
inline SectorBound sector_bound_from_mu(double mu_min, const PathSpec& path) {
    if (path.lambda_grid.empty()) {
        throw DomainError("sector_bound: empty path");
    }
    double d = 0.0;
    for (double lambda : path.lambda_grid) {
        d = std::max(d, (lambda + 1.0) / (lambda + mu_min));
    }
    return {d, 0.0, path.lambda_max()};
}

inline SectorBound sector_bound(const SystemSpectrum& spec, const PathSpec& path) {
    return sector_bound_from_mu(spec.mu_min(), path);
}

inline SectorBound sector_bound(const ClosedControlSystem& sys, const PathSpec& path) {
    if (path.lambda_grid.empty()) {
        throw DomainError("sector_bound: empty path");
    }
    return sector_bound_from_mu(growth_bound(sys).omega, path);
}

inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("alpha must lie in (0,1), got " + std::to_string(alpha));
    }
}

/// ‖(-A_n)^{-1+α} B_n‖_{L(U, Xⁿ)}.
///
/// With A = V diag(λ) Vᵀ, ‖(-A)^{-1+α} B u‖₂ = ‖diag((-λ)^{-1+α}) VᵀB u‖₂,
/// and VᵀB only needs the eigenvector rows on B's support.
inline double frac_control_norm(const ClosedControlSystem& sys, const SystemSpectrum& spec, double alpha) {
    check_alpha(alpha);
    const auto& rows = spec.rows;
    const std::size_t m = rows.eigenvalues.size();
    const std::size_t inputs = sys.b_matrix.cols();
    Matrix projected(m, inputs);
    for (std::size_t j = 0; j < m; ++j) {
        const double scale = std::pow(-rows.eigenvalues[j], -1.0 + alpha);
        for (std::size_t c = 0; c < inputs; ++c) {
            double acc = 0.0;
            for (std::size_t r = 0; r < rows.rows.size(); ++r) {
                acc += rows.entries(r, j) * sys.b_matrix(rows.rows[r], c);
            }
            projected(j, c) = scale * acc;
        }
    }
    return numerics::weighted_op_norm(projected, sys.space.weight(), sys.space.input_norm);
}

inline double frac_control_norm(const ClosedControlSystem& sys, double alpha) {
    return frac_control_norm(sys, system_spectrum(sys), alpha);
}

/// Dense (-A_n)^{-1+α} B_n through the full spectral matrix function.
inline Matrix frac_control_operator(const ClosedControlSystem& sys, double alpha) {
    check_alpha(alpha);
    const auto eig = numerics::sym_tridiag_eig(sys.a_matrix);
    if (!(eig.eigenvalues.back() < 0.0)) {
        throw StabilityError("frac_control_operator: system is not Hurwitz");
    }
    const Matrix power = numerics::matrix_function(eig, [alpha](double l) { return std::pow(-l, -1.0 + alpha); });
    return power * sys.b_matrix;
}

struct KConstants {
    double k1 = 0.0;
    double k2 = 0.0;
    double kappa = 0.0;
};

inline double kappa_from(double k1, double k2, double omega, double alpha) {
    return k1 / omega + k2 * std::pow(omega, -alpha) * numerics::gamma_fn(alpha);
}

/// K₁ = ωM/Γ(1-α)·∫s^{-α}e^{-ωs}ds, K₂ = D/(Γ(1-α)π|cos θ|)·∫s^{-α}(1+s)^{-1}ds,
/// κ = K₁/ω + K₂ω^{-α}Γ(α). Quadrature values are checked against the closed
/// forms K₁ = Mω^α and K₂ = D/(Γ(1-α)|cos θ| sin(πα)).
inline KConstants k_constants(double alpha, double theta, const GrowthBound& gb, const SectorBound& sb) {
    check_alpha(alpha);
    const double cos_theta = std::cos(theta);
    if (cos_theta == 0.0) {
        throw DomainError("k_constants: cos(theta) = 0, K2 divides by zero");
    }
    if (!(theta > std::numbers::pi / 2 && theta < std::numbers::pi)) {
        throw DomainError("k_constants: theta must lie in (pi/2, pi), got " + std::to_string(theta));
    }
    if (!(gb.omega > 0.0)) {
        throw DomainError("k_constants: omega must be positive");
    }
    const double g1 = numerics::gamma_fn(1.0 - alpha);
    const auto exp_tail = numerics::quad_exp_tail(alpha, gb.omega);
    const auto cauchy_tail = numerics::quad_cauchy_tail(alpha);
    KConstants k;
    k.k1 = gb.omega * gb.m / g1 * exp_tail.value;
    k.k2 = sb.d / (g1 * std::numbers::pi * std::abs(cos_theta)) * cauchy_tail.value;
    k.kappa = kappa_from(k.k1, k.k2, gb.omega, alpha);

    const double k1_closed = gb.m * std::pow(gb.omega, alpha);
    const double k2_closed = sb.d / (g1 * std::abs(cos_theta) * std::sin(std::numbers::pi * alpha));
    if (std::abs(k.k1 - k1_closed) > 1e-8 * std::abs(k1_closed) ||
        std::abs(k.k2 - k2_closed) > 1e-8 * std::abs(k2_closed)) {
        throw Error("k_constants: quadrature disagrees with closed form (K1 " + format_real(k.k1) + " vs " +
                    format_real(k1_closed) + ", K2 " + format_real(k.k2) + " vs " + format_real(k2_closed) + ")");
    }
    return k;
}

inline constexpr double kDefaultTheta = std::numbers::pi * (1.0 - 1e-9);

/// ISS gains β̂(s,t) = beta_m·e^{-beta_omega·t}·s and γ̂(s) = gamma_slope·s.
struct GainBundle {
    double alpha = 0.5;
    double theta = kDefaultTheta;
    double k1 = 0.0;
    double k2 = 0.0;
    double kappa = 0.0;
    double frac_norm_limit = 0.0;
    double mu_e = 1.0;
    double mu_p = 1.0;
    double m_hat = 1.0;
    double d_hat = 1.0;
    double beta_m = 1.0;
    double beta_omega = 0.0;
    double gamma_slope = 0.0;

    double beta(double s, double t) const { return beta_m * std::exp(-beta_omega * t) * s; }
    double gamma(double s) const { return gamma_slope * s; }
};

/// Bundle from explicitly supplied K constants (κ and the slopes are derived).
inline GainBundle assemble_gains_with(double alpha, double theta, double k1, double k2, const GrowthBound& gb,
                                      const SectorBound& sb, double frac_norm_limit, double mu_e,
                                      double mu_p = 1.0) {
    check_alpha(alpha);
    if (!(frac_norm_limit >= 0.0) || !(mu_e > 0.0) || !(mu_p > 0.0) || !(gb.omega > 0.0)) {
        throw DomainError("assemble_gains: inputs must be finite and positive");
    }
    GainBundle g;
    g.alpha = alpha;
    g.theta = theta;
    g.k1 = k1;
    g.k2 = k2;
    g.kappa = kappa_from(k1, k2, gb.omega, alpha);
    g.frac_norm_limit = frac_norm_limit;
    g.mu_e = mu_e;
    g.mu_p = mu_p;
    g.m_hat = gb.m;
    g.d_hat = sb.d;
    g.beta_m = mu_p * mu_e * gb.m;
    g.beta_omega = gb.omega;
    g.gamma_slope = mu_e * g.kappa * frac_norm_limit;
    return g;
}

inline GainBundle assemble_gains(double alpha, double theta, const GrowthBound& gb, const SectorBound& sb,
                                 double frac_norm_limit, double mu_e, double mu_p = 1.0) {
    const auto k = k_constants(alpha, theta, gb, sb);
    return assemble_gains_with(alpha, theta, k.k1, k.k2, gb, sb, frac_norm_limit, mu_e, mu_p);
}

/// Checks ‖(-A)^α S(t)‖ ≤ K₁e^{-ωt} + K₂e^{-ωt}t^{-α} on a t-grid, with the
/// left side evaluated spectrally as max over μ ∈ σ(-A) of μ^α e^{-μt}.
inline DiagnosticReport lemma_frac_semigroup_check(const ClosedControlSystem& sys, const GainBundle& bundle,
                                                   const std::vector<double>& t_grid) {
    for (double t : t_grid) {
        if (!(t > 0.0)) {
            throw DomainError("lemma_frac_semigroup_check: t-grid must be positive (right side singular at 0)");
        }
    }
    const auto eig = numerics::sym_tridiag_eigenvalues(sys.a_matrix.diag, sys.a_matrix.lower);
    DiagnosticReport r;
    r.name = "lemma_frac_semigroup";
    Series lhs{"lhs", {}};
    Series rhs{"rhs", {}};
    bool ok = true;
    for (double t : t_grid) {
        double best = 0.0;
        for (double lambda : eig) {
            const double mu = -lambda;
            best = std::max(best, std::pow(mu, bundle.alpha) * std::exp(-mu * t));
        }
        const double decay = std::exp(-bundle.beta_omega * t);
        const double bound = bundle.k1 * decay + bundle.k2 * decay * std::pow(t, -bundle.alpha);
        ok = ok && best <= bound * (1.0 + 1e-9);
        r.index.push_back(t);
        lhs.values.push_back(best);
        rhs.values.push_back(bound);
    }
    r.series = {std::move(lhs), std::move(rhs)};
    r.verdict = guard_empty(r, ok ? Verdict::pass : Verdict::fail);
    r.detail = "n = " + std::to_string(sys.space.grid.n) + ", index is t";
    return r;
}

}  // namespace issgain
