#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "issgain/diagnostics.hpp"
#include "issgain/errors.hpp"
#include "issgain/gains.hpp"
#include "issgain/numerics.hpp"
#include "issgain/systems.hpp"

namespace issgain {

class InvalidRightInverseError : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

inline void check_preclosure_shapes(const PreClosureSystem& pre) {
    const std::size_t n = pre.grid.n;
    const bool ok = pre.ainit.rows() == n - 1 && pre.ainit.cols() == n + 1 && pre.bop.rows() == 2 &&
                    pre.bop.cols() == n + 1 && pre.restrict.rows() == n - 1 && pre.restrict.cols() == n + 1 &&
                    pre.bop_rinv.rows() == n + 1 && pre.bop_rinv.cols() == 2;
    if (!ok) {
        throw DimensionError("close_system: pre-closure matrices have inconsistent shapes");
    }
}

inline Tridiagonal dense_to_tridiagonal(const Matrix& m) {
    const std::size_t n = m.rows();
    Tridiagonal t{Vector(n), Vector(n - 1), Vector(n - 1)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t gap = i > j ? i - j : j - i;
            if (gap > 1 && m(i, j) != 0.0) {
                throw DomainError("close_system: closed generator is not tridiagonal");
            }
        }
        t.diag[i] = m(i, i);
        if (i + 1 < n) {
            t.lower[i] = m(i + 1, i);
            t.upper[i] = m(i, i + 1);
        }
    }
    return t;
}

}  // namespace detail

/// Discrete Fattorini closure of a pre-closure system.
///
/// A_n is 𝔄_n restricted to ker 𝔇_n, identified with the interior
/// coordinates through R_n (A_n = 𝔄_n R_nᵀ), and
/// B_n = 𝔄_n𝔇_{n,0} - A_nR_n𝔇_{n,0} = 𝔄_n(I - R_nᵀR_n)𝔇_{n,0}.
/// The second form only touches the boundary rows of 𝔇_{n,0}, which are
/// exactly the unit vectors, so B_n is computed without rounding.
inline ClosedControlSystem close_system(const PreClosureSystem& pre, const WeightedSpace& space) {
    detail::check_preclosure_shapes(pre);
    if (space.grid.n != pre.grid.n) {
        throw DimensionError("close_system: space grid does not match the pre-closure grid");
    }
    const Matrix product = pre.bop * pre.bop_rinv;
    if (max_abs_diff(product, Matrix::identity(2)) != 0.0) {
        throw InvalidRightInverseError("close_system: bop·bop_rinv is not the identity (max deviation " +
                                       format_real(max_abs_diff(product, Matrix::identity(2))) + ")");
    }
    const Matrix rt = pre.restrict.transpose();
    const Matrix a_dense = pre.ainit * rt;
    const Matrix boundary_projector = Matrix::identity(pre.grid.n + 1) - rt * pre.restrict;
    Matrix b = pre.ainit * (boundary_projector * pre.bop_rinv);
    return {space, detail::dense_to_tridiagonal(a_dense), std::move(b), pre.diffusion};
}

/// Max-abs gap between B_n from close_system and the literal
/// 𝔄_n𝔇_{n,0} - A_nR_n𝔇_{n,0}, relative to max|B_n|.
inline double literal_closure_residual(const PreClosureSystem& pre, const ClosedControlSystem& closed) {
    const Matrix literal =
        pre.ainit * pre.bop_rinv - closed.a_matrix.to_dense() * (pre.restrict * pre.bop_rinv);
    return max_abs_diff(literal, closed.b_matrix) / std::max(1.0, max_abs(closed.b_matrix));
}

/// D_n per system and a verdict on uniform sectoriality.
///
/// Pass when sup_n D_n is finite and D_n varies by less than 1% over the
/// upper half of the n values. The path is the positive real ray applied to
/// A_n, i.e. ‖R(λ, A_n)‖ = 1/(λ + μ_min) for symmetric A_n.
inline DiagnosticReport sector_diagnostic(const std::vector<ClosedControlSystem>& systems, const PathSpec& path) {
    DiagnosticReport r;
    r.name = "sector";
    if (systems.size() < 2) {
        throw DomainError("sector_diagnostic: need at least 2 systems");
    }
    Series d{"d_n", {}};
    for (const auto& sys : systems) {
        r.index.push_back(static_cast<double>(sys.space.grid.n));
        try {
            d.values.push_back(sector_bound(sys, path).d);
        } catch (const StabilityError& e) {
            r.series = {d};
            r.verdict = Verdict::fail;
            r.detail = "non-Hurwitz system at n = " + std::to_string(sys.space.grid.n) + ": " + e.what();
            return r;
        }
    }
    const double sup = *std::max_element(d.values.begin(), d.values.end());
    const std::size_t half = d.values.size() / 2;
    const auto [lo, hi] = std::minmax_element(d.values.begin() + static_cast<std::ptrdiff_t>(half), d.values.end());
    const double spread = (*hi - *lo) / std::abs(*hi);
    r.series = {std::move(d)};
    r.verdict = guard_empty(r, std::isfinite(sup) && spread < 0.01 ? Verdict::pass : Verdict::fail);
    r.detail = "sup D_n = " + format_real(sup) + ", relative spread over upper half " + format_real(spread) +
               "; resolvent of A_n on the real ray, truncated at lambda_max = " + format_real(path.lambda_max());
    return r;
}

/// Exact resolvent R(λ, A) of a·∂² with Dirichlet conditions on a sine-mode sum.
inline Profile exact_heat_resolvent(const std::vector<SineMode>& modes, double a, double lambda) {
    std::vector<SineMode> scaled = modes;
    for (auto& m : scaled) {
        const double k = static_cast<double>(m.k);
        m.c /= lambda + a * k * k * std::numbers::pi * std::numbers::pi;
    }
    return analytic_heat_state(std::move(scaled), a, 0.0);
}

/// sup over the path of ‖E_n R(λ, A_n) P_n f - R(λ, A) f‖_{L²}.
inline double resolvent_gap_at(std::size_t n, double a, const PathSpec& path, const std::vector<SineMode>& modes) {
    const auto sys = build_heat_dirichlet(n, a);
    const auto pair = make_pair(n);
    const auto probe = analytic_heat_state(modes, a, 0.0);
    const Vector sampled = pair.restrict(probe);
    double sup = 0.0;
    for (double lambda : path.lambda_grid) {
        const Vector discrete = sys.a_matrix.solve_shifted(lambda, sampled);
        sup = std::max(sup, l2_distance(pair.extend(discrete), exact_heat_resolvent(modes, a, lambda)));
    }
    return sup;
}

/// Empirical check of resolvent convergence on sine-mode probes; pass when
/// the gap shrinks at least twofold from n_coarse to n_fine.
inline DiagnosticReport resolvent_gap(double a, std::size_t n_coarse, std::size_t n_fine, const PathSpec& path,
                                      const std::vector<SineMode>& probe) {
    if (n_fine < 2 * n_coarse) {
        throw DomainError("resolvent_gap: n_fine must be at least 2·n_coarse");
    }
    DiagnosticReport r;
    r.name = "resolvent_gap";
    const double coarse = resolvent_gap_at(n_coarse, a, path, probe);
    const double fine = resolvent_gap_at(n_fine, a, path, probe);
    r.index = {static_cast<double>(n_coarse), static_cast<double>(n_fine)};
    r.series = {{"sup_gap", {coarse, fine}}};
    const double ratio = coarse / fine;
    r.verdict = guard_empty(r, ratio >= 2.0 ? Verdict::pass : Verdict::fail);
    r.detail = "empirical (finite probe family); coarse/fine ratio " + format_real(ratio);
    return r;
}

/// Twice continuously differentiable probe vanishing at 0 and 1, with its
/// second derivative.
struct ConsistencyProbe {
    std::string name;
    Profile f;
    Profile f2;
};

/// Boundedness of E_nA_nP_n as a map D(A)→X and X→X_{-1}.
///
/// Reports per n, for each probe, ‖E_nA_nP_nf‖/(‖f‖+‖f″‖) and
/// ‖A_n^{-1}(A_nP_nf)‖_{Xⁿ}/‖f‖ (discrete extrapolation norm, weight p = 1).
/// Pass when every nonzero ratio sequence has max/min ≤ 10.
inline DiagnosticReport consistency_diagnostic(double a, const std::vector<std::size_t>& ns,
                                               const std::vector<ConsistencyProbe>& probes) {
    for (const auto& p : probes) {
        if (std::abs(p.f(0.0)) > 1e-12 || std::abs(p.f(1.0)) > 1e-12) {
            throw DomainError("consistency_diagnostic: probe '" + p.name + "' does not vanish at the boundary");
        }
    }
    DiagnosticReport r;
    r.name = "consistency";
    for (std::size_t n : ns) {
        r.index.push_back(static_cast<double>(n));
    }
    bool bounded = true;
    for (const auto& p : probes) {
        Series to_x{p.name + ".d_to_x", {}};
        Series to_xm1{p.name + ".x_to_xminus1", {}};
        const double f_norm = l2_norm(p.f);
        const double f2_norm = l2_norm(p.f2);
        for (std::size_t n : ns) {
            const auto sys = build_heat_dirichlet(n, a, {1.0, ColNorm::max});
            const auto pair = make_pair(n);
            const Vector applied = sys.a_matrix.apply(pair.restrict(p.f));
            const double num1 = l2_norm(pair.extend(applied), 4 * n);
            to_x.values.push_back(f_norm + f2_norm > 0.0 ? num1 / (f_norm + f2_norm) : 0.0);
            const Vector back = sys.a_matrix.solve(applied);
            const double num2 = weighted_state_norm(back, sys.space);
            to_xm1.values.push_back(f_norm > 0.0 ? num2 / f_norm : 0.0);
        }
        for (const auto* s : {&to_x, &to_xm1}) {
            const auto [lo, hi] = std::minmax_element(s->values.begin(), s->values.end());
            if (*hi > 0.0 && (*lo <= 0.0 || *hi / *lo > 10.0)) {
                bounded = false;
            }
        }
        r.series.push_back(std::move(to_x));
        r.series.push_back(std::move(to_xm1));
    }
    r.verdict = guard_empty(r, bounded ? Verdict::pass : Verdict::fail);
    r.detail = "empirical (finite probe family); pass if every ratio sequence has max/min <= 10";
    return r;
}

inline std::vector<ConsistencyProbe> default_consistency_probes() {
    constexpr double pi = std::numbers::pi;
    return {
        {"sin1", [](double x) { return std::sin(pi * x); }, [](double x) { return -pi * pi * std::sin(pi * x); }},
        {"sin3", [](double x) { return std::sin(3 * pi * x); },
         [](double x) { return -9 * pi * pi * std::sin(3 * pi * x); }},
        {"parabola", [](double x) { return x * (1.0 - x); }, [](double) { return -2.0; }},
    };
}

/// Right-inverse checks on the pre-closure family:
///  interp_gap      sup |Ẽ_n𝔇_{n,0}e_j - 𝔇_0e_j| against the linear profiles,
///  ainit_rinv      max |𝔄_n𝔇_{n,0}|,
///  lifted_gap      sup |A_n^{-1}𝔄_n𝔇_{n,0}e_j| (its limit A^{-1}𝔄𝔇_0 vanishes).
/// Pass when all three vanish to rounding, warn otherwise.
inline DiagnosticReport right_inverse_gap(const std::vector<PreClosureSystem>& pre_systems) {
    DiagnosticReport r;
    r.name = "right_inverse";
    Series interp{"interp_gap", {}};
    Series ainit{"ainit_rinv", {}};
    Series lifted{"lifted_gap", {}};
    bool clean = true;
    for (const auto& pre : pre_systems) {
        detail::check_preclosure_shapes(pre);
        const std::size_t n = pre.grid.n;
        const double scale = pre.diffusion * static_cast<double>(n) * static_cast<double>(n);
        const ApproximationPair pair{pre.grid, 1.0, 1.0};
        double gap = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const auto interpolant = pair.extend_full(pre.bop_rinv.column(j));
            const auto linear = [j](double x) { return j == 0 ? 1.0 - x : x; };
            const std::size_t samples = 8 * n;
            for (std::size_t s = 0; s <= samples; ++s) {
                const double x = static_cast<double>(s) / static_cast<double>(samples);
                gap = std::max(gap, std::abs(interpolant(x) - linear(x)));
            }
        }
        const Matrix ad = pre.ainit * pre.bop_rinv;
        const auto closed = close_system(pre, make_space(n, {}));
        double lift = 0.0;
        for (std::size_t j = 0; j < 2; ++j) {
            const Vector back = closed.a_matrix.solve(ad.column(j));
            for (double v : back) {
                lift = std::max(lift, std::abs(v));
            }
        }
        interp.values.push_back(gap);
        ainit.values.push_back(max_abs(ad));
        lifted.values.push_back(lift);
        r.index.push_back(static_cast<double>(n));
        clean = clean && gap <= 1e-12 && max_abs(ad) <= 1e-12 * scale && lift <= 1e-12;
    }
    r.series = {std::move(interp), std::move(ainit), std::move(lifted)};
    r.verdict = guard_empty(r, clean ? Verdict::pass : Verdict::warn);
    r.detail = "empirical; linear profiles are reproduced exactly by the hat interpolant";
    return r;
}

struct MuEstimate {
    double mu_p = 0.0;
    double mu_e = 0.0;
};

/// Exact ‖E_n x‖_{L²} from the hat-function mass matrix.
inline double extension_l2_norm(std::span<const double> x, const GridSpec& grid) {
    double acc = 0.0;
    double left = 0.0;
    for (std::size_t k = 0; k <= x.size(); ++k) {
        const double right = k < x.size() ? x[k] : 0.0;
        acc += (left * left + left * right + right * right) / 3.0;
        left = right;
    }
    return std::sqrt(grid.dx * acc);
}

/// Empirical bounds for ‖P_n‖ and ‖E_n‖ (weight p = 1) over sample
/// functions and seeded random grid vectors.
inline MuEstimate estimate_mu(const std::vector<Profile>& samples, const std::vector<std::size_t>& ns,
                              std::uint64_t seed = 0x5eed, std::size_t random_vectors = 16) {
    if (samples.empty()) {
        throw DomainError("estimate_mu: need at least one sample function");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    MuEstimate mu;
    for (std::size_t n : ns) {
        const auto pair = make_pair(n);
        const auto space = make_space(n, {1.0, ColNorm::max});
        auto record_vector = [&](const Vector& x) {
            const double xn = weighted_state_norm(x, space);
            if (xn > 0.0) {
                mu.mu_e = std::max(mu.mu_e, extension_l2_norm(x, pair.grid) / xn);
            }
        };
        for (const auto& f : samples) {
            const double fn = l2_norm(f);
            if (!(fn > 0.0)) {
                throw DomainError("estimate_mu: sample with zero L2 norm");
            }
            const Vector x = pair.restrict(f);
            mu.mu_p = std::max(mu.mu_p, weighted_state_norm(x, space) / fn);
            record_vector(x);
        }
        for (std::size_t i = 0; i < random_vectors; ++i) {
            Vector x(n - 1);
            for (auto& v : x) {
                v = unit(rng);
            }
            record_vector(x);
        }
    }
    return mu;
}

}  // namespace issgain
