#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "issgain/simulate.hpp"
#include "support/oracles.hpp"

using namespace issgain;
using Catch::Approx;

namespace {

constexpr double pi = std::numbers::pi;

const SpaceConfig kSimSpace{1.0, ColNorm::max};

double sin_pi(double xi) { return std::sin(pi * xi); }

GainBundle reference_gains() {
    return assemble_gains_with(0.5, kDefaultTheta, 3.1408, 0.5626, {1.0, 9.8647}, {0.9991, 0.0, 1e4}, 1.4136, 1.0);
}

double max_rel_diff(const Vector& got, const Vector& want) {
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        scale = std::max(scale, std::abs(want[i]));
        diff = std::max(diff, std::abs(got[i] - want[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

}  // namespace

TEST_CASE("input signals", "[simulate]") {
    const auto c = constant_input({1.0, -2.0});
    CHECK(c.kind == InputKind::constant);
    CHECK(c.sup_norm == 2.0);
    CHECK(c.at(12345) == Sample{1.0, -2.0});
    CHECK(constant_input({3.0, 4.0}, ColNorm::euclidean).sup_norm == 5.0);

    const auto pc = piecewise_constant_input({{0.0, 1.0}, {-3.0, 0.5}});
    CHECK(pc.sup_norm == 3.0);
    CHECK(pc.at(1) == Sample{-3.0, 0.5});
    CHECK_THROWS_AS(pc.at(2), DimensionError);
    CHECK_THROWS_AS(piecewise_constant_input({}), DomainError);
}

TEST_CASE("bang-bang inputs are seeded and restricted", "[simulate][property]") {
    const auto a = seeded_random_bang_bang(99, {500, 3, ActiveBoundary::both});
    const auto b = seeded_random_bang_bang(99, {500, 3, ActiveBoundary::both});
    const auto c = seeded_random_bang_bang(100, {500, 3, ActiveBoundary::both});
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    CHECK(a.seed == std::optional<std::uint64_t>(99));
    CHECK(a.sup_norm == sup_norm_of(a.values, ColNorm::max));
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        for (double v : a.values[k]) CHECK((v == -1.0 || v == 0.0 || v == 1.0));
        if (k % 3 != 0) CHECK(a.values[k] == a.values[k - 1]);
    }
    const auto left = seeded_random_bang_bang(5, {200, 1, ActiveBoundary::left});
    const auto right = seeded_random_bang_bang(5, {200, 1, ActiveBoundary::right});
    for (std::size_t k = 0; k < 200; ++k) {
        CHECK(left.values[k][1] == 0.0);
        CHECK(right.values[k][0] == 0.0);
    }
    CHECK(left.sup_norm <= 1.0);
    CHECK_THROWS_AS(seeded_random_bang_bang(1, {0, 1, ActiveBoundary::both}), DomainError);
    CHECK_THROWS_AS(seeded_random_bang_bang(1, {10, 0, ActiveBoundary::both}), DomainError);
}

TEST_CASE("step_exact examples", "[simulate]") {
    const auto s2 = build_heat_dirichlet(2, 1.0, kSimSpace);
    CHECK(step_exact(s2, Vector{1.0}, {0.0, 0.0}, 0.1)[0] == Approx(std::exp(-0.8)).epsilon(1e-14));
    CHECK(step_exact(s2, Vector{1.0}, {0.0, 0.0}, 0.1)[0] == Approx(0.449329).margin(1e-6));
    CHECK(step_exact(s2, Vector{0.0}, {1.0, 1.0}, 50.0)[0] == Approx(1.0).epsilon(1e-14));
    CHECK(steady_state(s2, {1.0, 1.0})[0] == Approx(1.0).epsilon(1e-15));

    const auto s9 = build_heat_dirichlet(9, 1.0, kSimSpace);
    for (double v : step_exact(s9, Vector(8, 0.0), {0.0, 0.0}, 0.3)) CHECK(v == 0.0);
    CHECK_THROWS_AS(step_exact(s9, Vector(8, 0.0), {0.0, 0.0}, 0.0), DomainError);
}

TEST_CASE("step_exact agrees with a dense exponential oracle", "[simulate][property]") {
    const auto sys = build_heat_dirichlet(12, 0.7, kSimSpace);
    const Matrix a = sys.a_matrix.to_dense();
    const double h = 0.013;
    const Matrix e = testing::taylor_expm(a * h);
    Vector x(11);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(1.3 * static_cast<double>(i));
    const Sample u{0.7, -1.2};

    const Vector ex = e * x;
    const std::array<double, 2> uu = u;
    const Vector bu = sys.b_matrix * std::span<const double>(uu);
    Vector rhs = e * bu;
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= bu[i];
    const Vector lifted = testing::dense_solve(a, rhs);
    Vector want(ex.size());
    for (std::size_t i = 0; i < want.size(); ++i) want[i] = ex[i] + lifted[i];

    CHECK(max_rel_diff(step_exact(sys, x, u, h), want) < 1e-10);
}

TEST_CASE("simulate on an eigenvector decays exactly", "[simulate][property]") {
    // Horizon of five e-foldings of the mode; beyond that the rounding left
    // in slower modes outweighs the decayed component itself.
    const std::size_t n = 100;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    for (int k : {1, 2, 5, 50, 99}) {
        const auto x0 = discrete_sine_vector(n, k);
        const double lambda = heat_eigenvalue(n, 1.0, k);
        const double t_end = 5.0 / -lambda;
        const auto traj = simulate(sys, x0, constant_input({0.0, 0.0}), t_end, t_end / 40.0, {true, "eig"});
        REQUIRE(traj.states.size() == traj.times.size());
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
            Vector want = x0;
            for (double& v : want) v *= std::exp(lambda * traj.times[i]);
            INFO("k = " << k << ", t = " << traj.times[i]);
            CHECK(max_rel_diff(traj.states[i], want) < 1e-10);
        }
    }
}

TEST_CASE("simulate norm of the first mode", "[simulate]") {
    const std::size_t n = 1000;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    const double omega = -heat_eigenvalue(n, 1.0, 1);
    const auto traj = simulate(sys, Profile(sin_pi), constant_input({0.0, 0.0}), 0.5, 0.01);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        CHECK(traj.norms[i] == Approx(std::exp(-omega * traj.times[i]) * traj.norms[0]).epsilon(1e-9));
    }
    CHECK(traj.states.empty());
}

TEST_CASE("simulate superposition", "[simulate][property]") {
    const std::size_t n = 100;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    Vector x0(n - 1);
    for (std::size_t i = 0; i < x0.size(); ++i) x0[i] = std::sin(0.37 * static_cast<double>(i * i)) + 0.5;
    const auto u = seeded_random_bang_bang(77, {100, 4, ActiveBoundary::both});
    const auto zero_u = constant_input({0.0, 0.0});
    const SimulationOptions keep{true, "s"};
    const auto full = simulate(sys, x0, u, 0.1, 0.001, keep);
    const auto free = simulate(sys, x0, zero_u, 0.1, 0.001, keep);
    const auto forced = simulate(sys, Vector(n - 1, 0.0), u, 0.1, 0.001, keep);
    REQUIRE(full.states.size() == 101);
    for (std::size_t i = 0; i < full.states.size(); ++i) {
        Vector sum = free.states[i];
        for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += forced.states[i][j];
        CHECK(max_rel_diff(full.states[i], sum) < 1e-10);
    }
}

TEST_CASE("trajectory norms are recomputable from states", "[simulate][property]") {
    const auto sys = build_heat_dirichlet(60, 1.0, kSimSpace);
    const auto traj = simulate(sys, Profile(sin_pi), constant_input({1.0, 0.0}), 0.05, 0.005, {true, "r"});
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        CHECK(std::abs(traj.norms[i] - weighted_state_norm(traj.states[i], sys.space)) < 1e-12);
    }
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 0.05);
}

TEST_CASE("simulate with the rows-only route matches the full basis", "[simulate][property]") {
    const auto sys = build_heat_dirichlet(80, 1.0, kSimSpace);
    const auto u = seeded_random_bang_bang(3, {50, 2, ActiveBoundary::left});
    const auto lean = simulate(sys, Profile(sin_pi), u, 0.05, 0.001);
    const auto rich = simulate(sys, Profile(sin_pi), u, 0.05, 0.001, {true, "x"});
    for (std::size_t i = 0; i < lean.norms.size(); ++i) {
        CHECK(lean.norms[i] == Approx(rich.norms[i]).epsilon(1e-11));
    }
}

TEST_CASE("constant one-sided input reaches the harmonic steady state", "[simulate]") {
    const std::size_t n = 1000;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    const auto traj = simulate(sys, Vector(n - 1, 0.0), constant_input({1.0, 0.0}), 3.0, 0.01, {true, "c"});
    const auto& last = traj.states.back();
    for (std::size_t k = 1; k < n; ++k) {
        CHECK(last[k - 1] == Approx(1.0 - static_cast<double>(k) / n).margin(1e-9));
    }
    const double nn = static_cast<double>(n);
    const double exact = std::sqrt((nn - 1.0) * (2.0 * nn - 1.0) / (6.0 * nn * nn));
    CHECK(traj.norms.back() == Approx(exact).epsilon(1e-9));
    CHECK(traj.norms.back() == Approx(1.0 / std::sqrt(3.0)).margin(2e-3));

}

TEST_CASE("steady-state residual decays at the growth rate", "[simulate][property]") {
    const std::size_t n = 200;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    const double omega = -heat_eigenvalue(n, 1.0, 1);
    const Sample u{0.4, -1.0};
    const auto ss = steady_state(sys, u);
    const Vector x0 = make_pair(n).restrict(sin_pi);
    Vector offset = x0;
    for (std::size_t i = 0; i < offset.size(); ++i) offset[i] -= ss[i];
    for (double t_end : {0.1, 0.5, 1.0}) {
        const auto traj = simulate(sys, x0, constant_input(u), t_end, 0.01, {true, "ss"});
        Vector residual = traj.states.back();
        for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= ss[i];
        CHECK(numerics::norm2(residual) <= std::exp(-omega * t_end) * numerics::norm2(offset) * (1.0 + 1e-9));
    }
}

TEST_CASE("simulate zero in, zero out", "[simulate]") {
    const auto sys = build_heat_dirichlet(30, 1.0, kSimSpace);
    const auto traj = simulate(sys, Vector(29, 0.0), constant_input({0.0, 0.0}), 1.0, 0.1);
    for (double v : traj.norms) CHECK(v == 0.0);
    CHECK(traj.times.size() == 11);
}

TEST_CASE("simulate error paths", "[simulate]") {
    const auto sys = build_heat_dirichlet(10, 1.0, kSimSpace);
    const auto zero = constant_input({0.0, 0.0});
    CHECK_THROWS_AS(simulate(sys, Vector(9, 0.0), zero, 0.0, 0.1), DomainError);
    CHECK_THROWS_AS(simulate(sys, Vector(9, 0.0), zero, 1.0, -0.1), DomainError);
    CHECK_THROWS_AS(simulate(sys, Vector(9, 0.0), zero, 1.0, 1e-8), DomainError);
    CHECK_THROWS_AS(simulate(sys, Vector(5, 0.0), zero, 1.0, 0.1), DimensionError);
    const auto short_input = piecewise_constant_input({{1.0, 0.0}});
    CHECK_THROWS_AS(simulate(sys, Vector(9, 0.0), short_input, 1.0, 0.1), DimensionError);
}

TEST_CASE("simulate shortens the last step", "[simulate]") {
    const auto sys = build_heat_dirichlet(2, 1.0, kSimSpace);
    const auto traj = simulate(sys, Vector{1.0}, constant_input({0.0, 0.0}), 0.25, 0.1, {true, "t"});
    REQUIRE(traj.times.size() == 4);
    CHECK(traj.times.back() == 0.25);
    CHECK(traj.states.back()[0] == Approx(std::exp(-8.0 * 0.25)).epsilon(1e-13));
}

TEST_CASE("iss_margin examples", "[simulate]") {
    const auto gains = reference_gains();
    const std::size_t n = 1000;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);

    const auto one_sided = constant_input({1.0, 0.0});
    const auto traj = simulate(sys, Vector(n - 1, 0.0), one_sided, 3.0, 0.01);
    const auto m = iss_margin(traj, gains, 0.0, one_sided);
    CHECK(m.min_margin == Approx(0.8989 - 1.0 / std::sqrt(3.0)).margin(2e-3));
    CHECK(m.argmin_t == 3.0);

    const auto x0 = make_pair(n).restrict(sin_pi);
    const auto free = simulate(sys, x0, constant_input({0.0, 0.0}), 1.0, 0.01);
    CHECK(iss_margin(free, gains, free.norms[0], constant_input({0.0, 0.0})).min_margin >= 0.0);

    const auto both = constant_input({1.0, 1.0});
    const auto both_traj = simulate(sys, Vector(n - 1, 0.0), both, 3.0, 0.01);
    CHECK(iss_margin(both_traj, gains, 0.0, both).min_margin == Approx(0.8989 - 1.0).margin(2e-3));

    CHECK_THROWS_AS(iss_margin(Trajectory{}, gains, 0.0, both), DomainError);
}

TEST_CASE("one-sided bang-bang inputs respect the gain", "[simulate][property]") {
    const auto gains = reference_gains();
    const std::size_t n = 200;
    const auto sys = build_heat_dirichlet(n, 1.0, kSimSpace);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto side = seed % 2 == 0 ? ActiveBoundary::left : ActiveBoundary::right;
        const auto u = seeded_random_bang_bang(seed, {400, 1 + seed * 7, side});
        const auto traj = simulate(sys, Vector(n - 1, 0.0), u, 2.0, 0.005);
        INFO("seed = " << seed);
        CHECK(iss_margin(traj, gains, 0.0, u).min_margin > 0.0);
    }
}

TEST_CASE("trotter_kato_check", "[simulate]") {
    const auto r = trotter_kato_check(1.0, {{1, 1.0}}, 0.1, {16, 32, 64});
    CHECK(r.verdict == Verdict::pass);
    const auto* ratio = r.find("ratio");
    REQUIRE(ratio != nullptr);
    REQUIRE(ratio->values.size() == 2);
    for (double q : ratio->values) {
        CHECK(q >= 3.0);
        CHECK(q <= 5.0);
    }

    const auto high = trotter_kato_check(1.0, {{3, 1.0}}, 0.05, {16, 32, 64});
    for (double q : high.find("ratio")->values) {
        CHECK(q >= 3.0);
        CHECK(q <= 5.0);
    }

    const auto at_zero = trotter_kato_check(1.0, {{1, 1.0}}, 0.0, {16});
    const auto pair = make_pair(16);
    CHECK(at_zero.find("gap")->values[0] == Approx(l2_distance(pair.extend(pair.restrict(sin_pi)), sin_pi)).epsilon(1e-14));

    CHECK_THROWS_AS(trotter_kato_check(1.0, {{1, 1.0}}, -1.0, {16}), DomainError);
    CHECK_THROWS_AS(trotter_kato_check(1.0, {{1, 1.0}}, 0.1, {32, 16}), DomainError);
}

TEST_CASE("trajectory CSV", "[simulate]") {
    Trajectory traj{"demo", {0.0, 0.5}, {}, {1.0, 0.25}, std::nullopt};
    CHECK(trajectory_csv(traj) == "t,norm\n0.000000000,1.000000000\n0.5000000000,0.2500000000\n");
    const auto path = (std::filesystem::temp_directory_path() / "issgain_traj_test.csv").string();
    write_trajectory_csv(traj, path);
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == trajectory_csv(traj));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(write_trajectory_csv(traj, "/nonexistent-dir/t.csv"), IoError);
}
