// Acceptance run: one [PASS]/[FAIL] line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "issgain/cli/commands.hpp"
#include "issgain/fattorini.hpp"
#include "issgain/gains.hpp"
#include "issgain/simulate.hpp"
#include "issgain/sweep.hpp"
#include "support/oracles.hpp"

using namespace issgain;

namespace {

constexpr double pi = std::numbers::pi;
const SpaceConfig kSweepSpace{2.0, ColNorm::max};
const SpaceConfig kSimSpace{1.0, ColNorm::max};

struct Outcome {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string num(double v) { return format_real(v); }

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double max_rel_diff(const Vector& got, const Vector& want) {
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        scale = std::max(scale, std::abs(want[i]));
        diff = std::max(diff, std::abs(got[i] - want[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

GainBundle reference_gains() {
    return assemble_gains_with(0.5, kDefaultTheta, 3.1408, 0.5626, {1.0, 9.8647}, {0.9991, 0.0, 1e4}, 1.4136, 1.0);
}

struct Shared {
    std::vector<SweepRecord> records;
    const SweepRecord& at(std::size_t n) const {
        return *std::find_if(records.begin(), records.end(), [n](const SweepRecord& r) { return r.n == n; });
    }
};

Outcome growth_bound_check(const Shared& s) {
    Outcome o;
    const double omega = s.at(4000).omega_n;
    o.note("omega_4000 = " + num(omega));
    o.expect(std::abs(omega - pi * pi) <= 1e-3, "|omega_4000 - pi^2| <= 1e-3");
    o.expect(omega >= 9.8647, "omega_4000 >= 9.8647");
    return o;
}

Outcome sector_check(const Shared& s) {
    Outcome o;
    const double d = s.at(4000).d_n;
    o.note("D_4000 = " + num(d));
    o.expect(std::abs(d - 0.9991) <= 2e-4, "D_4000 = 0.9991 +- 2e-4");
    for (const auto& r : s.records) {
        o.expect(r.d_n < 1.0, "D_n < 1 at n = " + std::to_string(r.n));
    }
    return o;
}

Outcome frac_norm_check(const Shared& s) {
    Outcome o;
    double worst = 0.0;
    for (const auto& r : s.records) {
        o.expect(r.frac_norm_n >= 1.410 && r.frac_norm_n <= 1.4143,
                 "frac norm in [1.410, 1.4143] at n = " + std::to_string(r.n) + " (got " + num(r.frac_norm_n) + ")");
        const auto g = testing::heat_gram_half(r.n, 1.0);
        const double w2 = std::pow(1.0 / static_cast<double>(r.n), 2.0);
        const double gram = std::sqrt(w2 * (g(0, 0) + g(1, 1) + 2.0 * std::abs(g(0, 1))));
        worst = std::max(worst, rel_err(r.frac_norm_n, gram));
    }
    o.note("max Gram-oracle relative gap " + num(worst));
    o.expect(worst <= 1e-9, "Gram-oracle agreement within 1e-9");
    return o;
}

Outcome gain_constants_check(const Shared& s) {
    Outcome o;
    const GrowthBound gb{1.0, 9.8647};
    const SectorBound sb{0.9991, 0.0, 1e4};
    const auto k = k_constants(0.5, kDefaultTheta, gb, sb);
    const auto bundle = assemble_gains(0.5, kDefaultTheta, gb, sb, s.at(4000).frac_norm_n, 1.0);
    o.note("K1 = " + num(k.k1) + ", K2 = " + num(k.k2) + ", kappa = " + num(k.kappa) + ", gamma = " +
           num(bundle.gamma_slope));
    o.expect(std::abs(k.k1 - 3.1408) <= 1e-3, "K1 = 3.1408 +- 1e-3");
    o.expect(k.k2 >= 0.5620 && k.k2 <= 0.5645, "K2 in [0.5620, 0.5645]");
    o.expect(k.kappa >= 0.6350 && k.kappa <= 0.6370, "kappa in [0.6350, 0.6370]");
    o.expect(bundle.gamma_slope >= 0.896 && bundle.gamma_slope <= 0.903, "gamma slope in [0.896, 0.903]");
    return o;
}

Outcome quadrature_check() {
    Outcome o;
    std::mt19937_64 rng(0xacce55);
    std::uniform_real_distribution<double> alpha_dist(0.05, 0.95);
    std::uniform_real_distribution<double> log_omega(std::log(0.1), std::log(100.0));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double alpha = alpha_dist(rng);
        const double omega = std::exp(log_omega(rng));
        const double e = rel_err(numerics::quad_exp_tail(alpha, omega).value,
                                 std::tgamma(1.0 - alpha) * std::pow(omega, alpha - 1.0));
        const double c = rel_err(numerics::quad_cauchy_tail(alpha).value, pi / std::sin(pi * alpha));
        worst = std::max({worst, e, c});
    }
    o.note("max relative error " + num(worst) + " over 20 samples");
    o.expect(worst <= 1e-8, "quadrature within 1e-8 of the closed forms");
    return o;
}

Outcome closure_check() {
    Outcome o;
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0}) {
        const auto r = cli::closure_equivalence_report(a, 64);
        for (const char* label : {"a_diff", "b_diff"}) {
            for (double v : r.find(label)->values) worst = std::max(worst, v);
        }
    }
    o.note("max entry difference " + num(worst) + " over n = 2..64, a in {0.5, 1, 2}");
    o.expect(worst == 0.0, "closed system equals the direct system entrywise");
    return o;
}

Outcome lemma_check(const Shared& s) {
    Outcome o;
    const auto lim = aggregate(s.records, 1e-4, 1e-3);
    const auto bundle = assemble_gains(0.5, kDefaultTheta, {1.0, lim.omega_hat.value}, {lim.d_hat.value, 0.0, 1e4},
                                       lim.frac_limit.value, 1.0);
    for (std::size_t n : {100u, 1000u}) {
        const auto r = lemma_frac_semigroup_check(build_heat_dirichlet(n, 1.0, kSweepSpace), bundle,
                                                  cli::lemma_t_grid());
        double tightest = INFINITY;
        for (std::size_t i = 0; i < r.index.size(); ++i) {
            tightest = std::min(tightest, r.find("rhs")->values[i] / r.find("lhs")->values[i]);
        }
        o.note("n = " + std::to_string(n) + ": min rhs/lhs " + num(tightest));
        o.expect(r.verdict == Verdict::pass, "lemma bound at n = " + std::to_string(n));
    }
    return o;
}

Outcome trotter_kato_acceptance() {
    Outcome o;
    const auto r = trotter_kato_check(1.0, {{1, 1.0}}, 0.1, {16, 32, 64});
    const auto& gaps = r.find("gap")->values;
    o.note("gaps " + join_reals(gaps));
    for (std::size_t i = 1; i < gaps.size(); ++i) {
        const double ratio = gaps[i - 1] / gaps[i];
        o.expect(gaps[i] < gaps[i - 1], "gap decreases");
        o.expect(ratio >= 3.0 && ratio <= 5.0, "doubling ratio " + num(ratio) + " in [3, 5]");
    }
    return o;
}

Outcome iss_suite_check() {
    Outcome o;
    const std::size_t n = 1000;
    const double t_end = 3.0;
    const double h = 0.01;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    const auto gains = reference_gains();
    const Vector zero(n - 1, 0.0);
    double suite_min = INFINITY;
    for (std::uint64_t i = 0; i < 50; ++i) {
        const BangBangOptions opts{300, 10, i % 2 == 0 ? ActiveBoundary::left : ActiveBoundary::right};
        const auto u = seeded_random_bang_bang(1000 + i, opts);
        o.expect(u.sup_norm <= 1.0, "input sup norm <= 1");
        suite_min = std::min(suite_min, iss_margin(simulate(sys, zero, u, t_end, h), gains, 0.0, u).min_margin);
    }
    const auto one = constant_input({1.0, 0.0});
    const double m_one = iss_margin(simulate(sys, zero, one, t_end, h), gains, 0.0, one).min_margin;
    const auto both = constant_input({1.0, 1.0});
    const double m_both = iss_margin(simulate(sys, zero, both, t_end, h), gains, 0.0, both).min_margin;
    o.note("suite min margin " + num(suite_min) + ", one-sided constant " + num(m_one) +
           ", two-sided constant (report only) " + num(m_both));
    o.expect(suite_min > 0.0, "bang-bang suite margin > 0");
    o.expect(std::abs(m_one - 0.3215) <= 2e-3, "one-sided constant margin = 0.3215 +- 2e-3");
    return o;
}

Outcome simulator_exactness_check() {
    Outcome o;
    const std::size_t n = 100;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    double decay_worst = 0.0;
    for (int k : {1, 2, 5, 50, 99}) {
        const auto x0 = discrete_sine_vector(n, k);
        const double lambda = heat_eigenvalue(n, 1.0, k);
        const double t_end = 5.0 / -lambda;
        const auto traj = simulate(sys, x0, constant_input({0.0, 0.0}), t_end, t_end / 40.0, {true, "eig"});
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            Vector want = x0;
            for (double& v : want) v *= std::exp(lambda * traj.times[i]);
            decay_worst = std::max(decay_worst, max_rel_diff(traj.states[i], want));
        }
    }
    Vector x0(n - 1);
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::cos(0.21 * static_cast<double>(i)) + 0.25;
    const auto u = seeded_random_bang_bang(5, {200, 7, ActiveBoundary::both});
    const SimulationOptions keep{true, "s"};
    const auto full = simulate(sys, x0, u, 0.2, 0.001, keep);
    const auto free = simulate(sys, x0, constant_input({0.0, 0.0}), 0.2, 0.001, keep);
    const auto forced = simulate(sys, Vector(n - 1, 0.0), u, 0.2, 0.001, keep);
    double super_worst = 0.0;
    for (std::size_t i = 0; i < full.states.size(); ++i) {
        Vector sum = free.states[i];
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += forced.states[i][j];
        super_worst = std::max(super_worst, max_rel_diff(full.states[i], sum));
    }
    o.note("eigenvector decay " + num(decay_worst) + " (five e-foldings per mode), superposition " +
           num(super_worst));
    o.expect(decay_worst <= 1e-10, "eigenvector decay within 1e-10 relative");
    o.expect(super_worst <= 1e-10, "superposition within 1e-10 relative");
    return o;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome reproducibility_check() {
    Outcome o;
    const auto root = std::filesystem::temp_directory_path() / "issgain_acceptance";
    std::filesystem::remove_all(root);
    std::vector<std::string> files;
    for (const char* run : {"first", "second"}) {
        const std::string dir = (root / run).string();
        const char* argv[] = {"issgain", "sweep", "--output_dir", dir.c_str()};
        std::ostringstream out, err;
        const int code = cli::run(4, argv, out, err);
        o.expect(code == 0, std::string("sweep exit code 0 on the ") + run + " run: " + err.str());
        files.push_back(slurp(root / run / "sweep.csv"));
    }
    o.expect(!files[0].empty() && files[0] == files[1], "byte-identical sweep.csv");
    o.expect(files[0].rfind("n,omegan,Dn,AnalphaBnnorm\n", 0) == 0, "header n,omegan,Dn,AnalphaBnnorm");
    o.note(std::to_string(files[0].size()) + " bytes, identical = " + (files[0] == files[1] ? "yes" : "no"));
    std::filesystem::remove_all(root);
    return o;
}

}  // namespace

int main() {
    Shared shared;
    std::string setup_error;
    try {
        shared.records = run_sweep(default_schedule(), 1.0, 0.5, default_path(), kSweepSpace);
    } catch (const std::exception& e) {
        setup_error = e.what();
    }

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"growth bound", [&] { return growth_bound_check(shared); }},
        {"sector constant", [&] { return sector_check(shared); }},
        {"fractional control norm", [&] { return frac_norm_check(shared); }},
        {"gain constants", [&] { return gain_constants_check(shared); }},
        {"quadrature oracles", quadrature_check},
        {"closure equivalence", closure_check},
        {"fractional semigroup bound", [&] { return lemma_check(shared); }},
        {"Trotter-Kato convergence", trotter_kato_acceptance},
        {"empirical ISS suite", iss_suite_check},
        {"simulator exactness", simulator_exactness_check},
        {"reproducibility", reproducibility_check},
    };
    const bool needs_sweep[] = {true, true, true, true, false, false, true, false, false, false, false};

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        if (needs_sweep[i] && !setup_error.empty()) {
            o = {false, "sweep failed: " + setup_error};
        } else {
            try {
                o = criteria[i].second();
            } catch (const std::exception& e) {
                o = {false, std::string("exception: ") + e.what()};
            }
        }
        failures += o.ok ? 0 : 1;
        std::printf("[%s] %2zu %s: %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
