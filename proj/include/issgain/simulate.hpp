#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "issgain/diagnostics.hpp"
#include "issgain/errors.hpp"
#include "issgain/gains.hpp"
#include "issgain/numerics.hpp"
#include "issgain/systems.hpp"

namespace issgain {

using Sample = std::array<double, 2>;

enum class InputKind { constant, piecewise_constant, seeded_random_bang_bang };

inline std::string_view to_string(InputKind k) {
    switch (k) {
        case InputKind::constant:
            return "constant";
        case InputKind::piecewise_constant:
            return "piecewise_constant";
        case InputKind::seeded_random_bang_bang:
            return "seeded_random_bang_bang";
    }
    return "?";
}

inline double sample_norm(const Sample& u, ColNorm norm) {
    return norm == ColNorm::max ? std::max(std::abs(u[0]), std::abs(u[1])) : std::hypot(u[0], u[1]);
}

/// Boundary input, constant on each step of the simulation grid.
///
/// A constant signal holds one sample for every step; the other kinds hold
/// one sample per step.
struct InputSignal {
    InputKind kind = InputKind::constant;
    std::vector<Sample> values;
    double sup_norm = 0.0;
    ColNorm norm = ColNorm::max;
    std::optional<std::uint64_t> seed;

    const Sample& at(std::size_t step) const {
        if (kind == InputKind::constant) {
            return values.front();
        }
        if (step >= values.size()) {
            throw DimensionError("InputSignal: step " + std::to_string(step) + " beyond the " +
                                 std::to_string(values.size()) + " stored samples");
        }
        return values[step];
    }
};

inline double sup_norm_of(const std::vector<Sample>& values, ColNorm norm) {
    double best = 0.0;
    for (const auto& u : values) {
        best = std::max(best, sample_norm(u, norm));
    }
    return best;
}

inline InputSignal constant_input(Sample u, ColNorm norm = ColNorm::max) {
    return {InputKind::constant, {u}, sample_norm(u, norm), norm, std::nullopt};
}

inline InputSignal piecewise_constant_input(std::vector<Sample> values, ColNorm norm = ColNorm::max) {
    if (values.empty()) {
        throw DomainError("piecewise_constant_input: no samples");
    }
    const double sup = sup_norm_of(values, norm);
    return {InputKind::piecewise_constant, std::move(values), sup, norm, std::nullopt};
}

enum class ActiveBoundary { both, left, right };

struct BangBangOptions {
    std::size_t steps = 0;
    /// Number of consecutive steps that share one drawn sample.
    std::size_t dwell = 1;
    ActiveBoundary active = ActiveBoundary::both;
};

/// Samples drawn uniformly from {-1, 0, 1} per active component.
inline InputSignal seeded_random_bang_bang(std::uint64_t seed, const BangBangOptions& opts,
                                           ColNorm norm = ColNorm::max) {
    if (opts.steps == 0 || opts.dwell == 0) {
        throw DomainError("seeded_random_bang_bang: steps and dwell must be positive");
    }
    std::mt19937_64 rng(seed);
    auto draw = [&] { return static_cast<double>(static_cast<int>(rng() % 3) - 1); };
    std::vector<Sample> values(opts.steps);
    Sample current{};
    for (std::size_t k = 0; k < opts.steps; ++k) {
        if (k % opts.dwell == 0) {
            const double left = draw();
            const double right = draw();
            current = {opts.active == ActiveBoundary::right ? 0.0 : left,
                       opts.active == ActiveBoundary::left ? 0.0 : right};
        }
        values[k] = current;
    }
    const double sup = sup_norm_of(values, norm);
    return {InputKind::seeded_random_bang_bang, std::move(values), sup, norm, seed};
}

/// Exponential integrator in the eigenbasis of a symmetric A.
///
/// Holds the eigenvalues λ_j and the modal input matrix VᵀB. The full
/// eigenvector matrix is kept only on request (needed to map states back).
class SpectralPropagator {
public:
    explicit SpectralPropagator(const ClosedControlSystem& sys, bool keep_basis = false)
        : diag_(sys.a_matrix.diag), off_(sys.a_matrix.lower) {
        const auto& a = sys.a_matrix;
        if (!a.is_symmetric()) {
            throw DomainError("SpectralPropagator: state matrix must be symmetric");
        }
        if (sys.b_matrix.rows() != sys.dim() || sys.b_matrix.cols() != 2) {
            throw DimensionError("SpectralPropagator: B must be " + std::to_string(sys.dim()) + "x2");
        }
        if (keep_basis) {
            auto eig = numerics::sym_tridiag_eig(a);
            eigenvalues_ = std::move(eig.eigenvalues);
            basis_ = std::move(eig.eigenvectors);
            modal_b_ = basis_->transpose() * sys.b_matrix;
        } else {
            auto proj = numerics::sym_tridiag_project(a.diag, a.lower, sys.b_matrix);
            eigenvalues_ = std::move(proj.eigenvalues);
            modal_b_ = proj.coefficients.transpose();
        }
        for (double l : eigenvalues_) {
            if (l == 0.0) {
                throw StabilityError("SpectralPropagator: state matrix is singular");
            }
        }
    }

    std::size_t dim() const noexcept { return eigenvalues_.size(); }
    const Vector& eigenvalues() const noexcept { return eigenvalues_; }
    bool has_basis() const noexcept { return basis_.has_value(); }

    /// Vᵀx. Without a stored basis this costs one more QL sweep.
    Vector to_modal(std::span<const double> x) const {
        if (x.size() != dim()) {
            throw DimensionError("to_modal: length " + std::to_string(x.size()) + " for dimension " +
                                 std::to_string(dim()));
        }
        if (basis_) {
            return basis_->transpose() * x;
        }
        Matrix column(dim(), 1);
        for (std::size_t i = 0; i < dim(); ++i) {
            column(i, 0) = x[i];
        }
        const auto proj = numerics::sym_tridiag_project(diag_, off_, column);
        const auto coeffs = proj.coefficients.row(0);
        return {coeffs.begin(), coeffs.end()};
    }

    Vector from_modal(std::span<const double> z) const {
        if (!basis_) {
            throw DomainError("from_modal: propagator was built without the eigenbasis");
        }
        return *basis_ * z;
    }

    /// Per-mode factors e^{λh} and (e^{λh} - 1)/λ · VᵀB for one step length.
    struct StepFactors {
        double h = 0.0;
        Vector decay;
        Matrix drive;
    };

    StepFactors factors(double h) const {
        if (!(h > 0.0)) {
            throw DomainError("step: h must be positive");
        }
        StepFactors f{h, Vector(dim()), Matrix(dim(), 2)};
        for (std::size_t j = 0; j < dim(); ++j) {
            const double lh = eigenvalues_[j] * h;
            const double phi = std::expm1(lh) / eigenvalues_[j];
            f.decay[j] = std::exp(lh);
            f.drive(j, 0) = phi * modal_b_(j, 0);
            f.drive(j, 1) = phi * modal_b_(j, 1);
        }
        return f;
    }

    /// z ← e^{Λh} z + Λ⁻¹(e^{Λh} - I) VᵀB u.
    static void step(Vector& z, const Sample& u, const StepFactors& f) {
        for (std::size_t j = 0; j < z.size(); ++j) {
            z[j] = f.decay[j] * z[j] + (f.drive(j, 0) * u[0] + f.drive(j, 1) * u[1]);
        }
    }

    void step(Vector& z, const Sample& u, double h) const { step(z, u, factors(h)); }

private:
    Vector diag_;
    Vector off_;
    Vector eigenvalues_;
    Matrix modal_b_;
    std::optional<Matrix> basis_;
};

/// e^{Ah}x + A⁻¹(e^{Ah} - I)Bu.
inline Vector step_exact(const ClosedControlSystem& sys, std::span<const double> x, const Sample& u, double h) {
    if (!(h > 0.0)) {
        throw DomainError("step_exact: h must be positive");
    }
    SpectralPropagator prop(sys, true);
    auto z = prop.to_modal(x);
    prop.step(z, u, h);
    return prop.from_modal(z);
}

/// -A⁻¹Bu.
inline Vector steady_state(const ClosedControlSystem& sys, const Sample& u) {
    const std::array<double, 2> uu = u;
    auto bu = sys.b_matrix * std::span<const double>(uu);
    auto x = sys.a_matrix.solve(bu);
    for (double& v : x) {
        v = -v;
    }
    return x;
}

struct Trajectory {
    std::string label;
    Vector times;
    std::vector<Vector> states;
    Vector norms;
    std::optional<std::uint64_t> seed;
};

inline constexpr double kMaxSimulationSteps = 1e7;

struct SimulationOptions {
    bool record_states = false;
    std::string label = "run";
};

/// Steps of length h up to t_end; the last step is shortened if h does not
/// divide t_end. Norms use the system's weighted state norm.
inline Trajectory simulate(const ClosedControlSystem& sys, std::span<const double> x0, const InputSignal& input,
                           double t_end, double h, const SimulationOptions& opts = {}) {
    if (!(t_end > 0.0) || !(h > 0.0) || !std::isfinite(t_end)) {
        throw DomainError("simulate: t_end and h must be positive");
    }
    if (t_end / h > kMaxSimulationSteps) {
        throw DomainError("simulate: t_end/h = " + std::to_string(t_end / h) + " exceeds the step budget");
    }
    if (x0.size() != sys.dim()) {
        throw DimensionError("simulate: initial state has length " + std::to_string(x0.size()) +
                             " for dimension " + std::to_string(sys.dim()));
    }
    if (input.values.empty()) {
        throw DomainError("simulate: input has no samples");
    }
    auto steps = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
    steps = std::max<std::size_t>(steps, 1);

    const bool zero_start = std::all_of(x0.begin(), x0.end(), [](double v) { return v == 0.0; });
    SpectralPropagator prop(sys, opts.record_states);
    Vector z = zero_start ? Vector(sys.dim(), 0.0) : prop.to_modal(x0);
    const double w = sys.space.weight();

    Trajectory traj{opts.label, {}, {}, {}, input.seed};
    traj.times.reserve(steps + 1);
    traj.norms.reserve(steps + 1);
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.norms.push_back(w * numerics::norm2(z));
        if (opts.record_states) {
            traj.states.push_back(prop.from_modal(z));
        }
    };
    record(0.0);
    const auto full = prop.factors(h);
    const double last_t0 = static_cast<double>(steps - 1) * h;
    const auto tail = t_end - last_t0 == h ? full : prop.factors(t_end - last_t0);
    for (std::size_t k = 0; k < steps; ++k) {
        const bool last = k + 1 == steps;
        SpectralPropagator::step(z, input.at(k), last ? tail : full);
        record(last ? t_end : static_cast<double>(k + 1) * h);
    }
    return traj;
}

inline Trajectory simulate(const ClosedControlSystem& sys, const Profile& x0_fn, const InputSignal& input,
                           double t_end, double h, const SimulationOptions& opts = {}) {
    const auto x0 = make_pair(sys.space.grid.n).restrict(x0_fn);
    return simulate(sys, x0, input, t_end, h, opts);
}

struct IssMargin {
    double min_margin = 0.0;
    double argmin_t = 0.0;
};

/// min over samples of β̂(‖x₀‖, t) + γ̂(‖u‖∞) - ‖x(t)‖.
inline IssMargin iss_margin(const Trajectory& traj, const GainBundle& bundle, double x0_norm,
                            const InputSignal& input) {
    if (traj.norms.empty() || traj.norms.size() != traj.times.size()) {
        throw DomainError("iss_margin: empty or inconsistent trajectory");
    }
    IssMargin out{std::numeric_limits<double>::infinity(), 0.0};
    const double g = bundle.gamma(input.sup_norm);
    for (std::size_t i = 0; i < traj.norms.size(); ++i) {
        const double m = bundle.beta(x0_norm, traj.times[i]) + g - traj.norms[i];
        if (m < out.min_margin) {
            out = {m, traj.times[i]};
        }
    }
    return out;
}

/// L² gap between the extended discrete solution and the exact heat
/// solution at time t, for each n. Passes when every doubling of n shrinks
/// the gap by at least 2.
inline DiagnosticReport trotter_kato_check(double a, const std::vector<SineMode>& modes, double t,
                                           const std::vector<std::size_t>& n_list) {
    if (t < 0.0) {
        throw DomainError("trotter_kato_check: t must be nonnegative");
    }
    if (n_list.empty()) {
        throw DomainError("trotter_kato_check: empty n list");
    }
    DiagnosticReport report{"trotter_kato", {}, {{"gap", {}}, {"ratio", {}}}, Verdict::pass, ""};
    const auto initial = analytic_heat_state(modes, a, 0.0);
    const auto exact = analytic_heat_state(modes, a, t);
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        const std::size_t n = n_list[i];
        if (i > 0 && n <= n_list[i - 1]) {
            throw DomainError("trotter_kato_check: n list must be increasing");
        }
        const auto sys = build_heat_dirichlet(n, a, {1.0, ColNorm::max});
        const auto pair = make_pair(n);
        Vector x = pair.restrict(initial);
        if (t > 0.0) {
            x = simulate(sys, x, constant_input({0.0, 0.0}), t, t, {true, "tk"}).states.back();
        }
        report.index.push_back(static_cast<double>(n));
        report.series[0].values.push_back(l2_distance(pair.extend(x), exact));
    }
    const auto& gaps = report.series[0].values;
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double ratio = gaps[i - 1] / gaps[i];
        report.series[1].values.push_back(ratio);
        const double doublings = std::log2(static_cast<double>(n_list[i]) / static_cast<double>(n_list[i - 1]));
        if (!(ratio >= std::pow(2.0, doublings))) {
            report.verdict = Verdict::fail;
        }
    }
    report.detail = report.verdict == Verdict::pass ? "gaps shrink at least 2x per doubling"
                                                    : "gap reduction below 2x per doubling";
    return report;
}

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string text = "t,norm\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        text += format_real(traj.times[i]);
        text += ',';
        text += format_real(traj.norms[i]);
        text += '\n';
    }
    return text;
}

inline void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("write_trajectory_csv: cannot open " + path);
    }
    file << trajectory_csv(traj);
    if (!file) {
        throw IoError("write_trajectory_csv: write failed for " + path);
    }
}

}  // namespace issgain
