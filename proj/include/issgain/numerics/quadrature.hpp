#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "issgain/errors.hpp"

namespace issgain::numerics {

struct QuadratureResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    std::size_t evaluations = 0;
};

struct QuadratureOptions {
    double rel_tol = 1e-13;
    double abs_tol = 1e-300;
    std::size_t max_evaluations = 1'000'000;
};

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes on [-1, 1].
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
};

struct Panel {
    double lo;
    double hi;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

inline Panel kronrod_panel(const std::function<double(double)>& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) {
            gauss += kGaussWeights[j / 2] * pair;
        }
    }
    return {lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate falls below max(abs_tol, rel_tol*|value|). Exceeding the
/// evaluation budget throws QuadratureError carrying the best estimate.
inline QuadratureResult integrate(const std::function<double(double)>& f, double lo, double hi,
                                  const QuadratureOptions& opts = {}) {
    constexpr std::size_t kPerPanel = 15;
    std::priority_queue<detail::Panel> panels;
    auto first = detail::kronrod_panel(f, lo, hi);
    double value = first.value;
    double error = first.error;
    std::size_t evaluations = kPerPanel;
    panels.push(first);

    while (error > std::max(opts.abs_tol, opts.rel_tol * std::abs(value))) {
        if (evaluations + 2 * kPerPanel > opts.max_evaluations) {
            throw QuadratureError("integrate: evaluation budget exhausted (estimate " +
                                      std::to_string(value) + ", error " + std::to_string(error) + ")",
                                  value, error);
        }
        const auto worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.lo + worst.hi);
        const auto left = detail::kronrod_panel(f, worst.lo, mid);
        const auto right = detail::kronrod_panel(f, mid, worst.hi);
        evaluations += 2 * kPerPanel;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        if (!std::isfinite(value)) {
            throw QuadratureError("integrate: non-finite integrand", value, error);
        }
    }

    // Resum to shed the drift of the running updates.
    value = 0.0;
    error = 0.0;
    while (!panels.empty()) {
        value += panels.top().value;
        error += panels.top().error;
        panels.pop();
    }
    return {value, error, evaluations};
}

namespace detail {

inline void check_alpha(double alpha, const char* op) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError(std::string(op) + ": alpha must lie in (0,1), got " + std::to_string(alpha));
    }
}

inline QuadratureResult add(const QuadratureResult& lhs, const QuadratureResult& rhs) {
    return {lhs.value + rhs.value, lhs.abs_error_estimate + rhs.abs_error_estimate,
            lhs.evaluations + rhs.evaluations};
}

}  // namespace detail

/// ∫₀^∞ s^{-α} e^{-ωs} ds.
///
/// Split at s = 1. On [0,1] the substitution s = r^{1/(1-α)} removes the
/// endpoint singularity; on [1,∞) the substitution w = e^{-ω(s-1)} maps the
/// tail onto [0,1].
inline QuadratureResult quad_exp_tail(double alpha, double omega, const QuadratureOptions& opts = {}) {
    detail::check_alpha(alpha, "quad_exp_tail");
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw DomainError("quad_exp_tail: omega must be positive, got " + std::to_string(omega));
    }
    const double power = 1.0 / (1.0 - alpha);
    auto head = integrate(
        [&](double r) { return power * std::exp(-omega * std::pow(r, power)); }, 0.0, 1.0, opts);
    const double scale = std::exp(-omega) / omega;
    auto tail = integrate(
        [&](double w) {
            if (w <= 0.0) {
                return 0.0;
            }
            const double s = 1.0 - std::log(w) / omega;
            return scale * std::pow(s, -alpha);
        },
        0.0, 1.0, opts);
    return detail::add(head, tail);
}

/// ∫₀^∞ s^{-α} (1+s)^{-1} ds.
///
/// [0,1] uses s = r^{1/(1-α)}; [1,∞) is folded by s = 1/r and then
/// r = w^{1/α}, which leaves the smooth integrand (1/α)/(1 + w^{1/α}).
inline QuadratureResult quad_cauchy_tail(double alpha, const QuadratureOptions& opts = {}) {
    detail::check_alpha(alpha, "quad_cauchy_tail");
    const double head_power = 1.0 / (1.0 - alpha);
    auto head = integrate(
        [&](double r) { return head_power / (1.0 + std::pow(r, head_power)); }, 0.0, 1.0, opts);
    const double tail_power = 1.0 / alpha;
    auto tail = integrate(
        [&](double w) { return tail_power / (1.0 + std::pow(w, tail_power)); }, 0.0, 1.0, opts);
    return detail::add(head, tail);
}

}  // namespace issgain::numerics
