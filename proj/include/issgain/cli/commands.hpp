#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "issgain/cli/config.hpp"
#include "issgain/cli/svg.hpp"
#include "issgain/diagnostics.hpp"
#include "issgain/errors.hpp"
#include "issgain/fattorini.hpp"
#include "issgain/gains.hpp"
#include "issgain/simulate.hpp"
#include "issgain/sweep.hpp"

namespace issgain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"sweep", "gains", "simulate", "check", "plot"};
    return names;
}

namespace detail {

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

inline void write_text(const std::filesystem::path& p, const std::string& content) {
    std::ofstream file(p, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("cannot open " + p.string() + " for writing");
    }
    file << content;
    if (!file) {
        throw IoError("write to " + p.string() + " failed");
    }
}

inline std::optional<std::string> read_text(const std::filesystem::path& p) {
    std::ifstream file(p, std::ios::binary);
    if (!file) {
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << file.rdbuf();
    return ss.str();
}

inline std::map<std::string, std::string> parse_kv(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos) {
            kv[line.substr(0, eq)] = line.substr(eq + 1);
        }
    }
    return kv;
}

inline std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + std::to_string(v[i]);
    }
    return s;
}

inline std::string row(const std::string& name, const std::string& value) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-28s %s\n", name.c_str(), value.c_str());
    return buf;
}

inline std::string yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace detail

struct GainsResult {
    std::vector<SweepRecord> records;
    SweepLimits limits;
    GainBundle bundle;
};

/// Sweep, limit extraction and gain assembly in one pass.
inline GainsResult compute_gains(const RunConfig& cfg) {
    if (cfg.n_schedule.size() < 2) {
        throw ConfigError("n_schedule: limits need at least two resolutions");
    }
    GainsResult r;
    r.records = run_sweep(cfg.n_schedule, cfg.a, cfg.alpha, cfg.path(), cfg.sweep_space(), cfg.threads);
    try {
        r.limits = aggregate(r.records, cfg.tol_omega, cfg.tol_frac, cfg.mu_p, cfg.mu_e, cfg.richardson);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const GrowthBound gb{1.0, r.limits.omega_hat.value};
    const SectorBound sb{r.limits.d_hat.value, 0.0, cfg.lambda_max};
    r.bundle = assemble_gains(cfg.alpha, cfg.theta, gb, sb, r.limits.frac_limit.value, cfg.mu_e, cfg.mu_p);
    return r;
}

inline std::string gains_kv(const RunConfig& cfg, const GainsResult& g) {
    const auto& b = g.bundle;
    std::ostringstream out;
    out << "schedule=" << detail::join_sizes(cfg.n_schedule) << "\n";
    out << "a=" << format_real(cfg.a) << "\n";
    out << "alpha=" << format_real(b.alpha) << "\n";
    out << "theta=" << format_real(b.theta) << "\n";
    out << "omega_hat=" << format_real(g.limits.omega_hat.value) << "\n";
    out << "omega_last_delta=" << format_real(g.limits.omega_hat.last_delta) << "\n";
    out << "omega_converged=" << detail::yes_no(g.limits.omega_hat.converged) << "\n";
    out << "m_hat=" << format_real(b.m_hat) << "\n";
    out << "d_hat=" << format_real(b.d_hat) << "\n";
    out << "frac_norm_limit=" << format_real(b.frac_norm_limit) << "\n";
    out << "frac_last_delta=" << format_real(g.limits.frac_limit.last_delta) << "\n";
    out << "frac_converged=" << detail::yes_no(g.limits.frac_limit.converged) << "\n";
    out << "mu_p=" << format_real(b.mu_p) << "\n";
    out << "mu_e=" << format_real(b.mu_e) << "\n";
    out << "k1=" << format_real(b.k1) << "\n";
    out << "k2=" << format_real(b.k2) << "\n";
    out << "kappa=" << format_real(b.kappa) << "\n";
    out << "beta_m=" << format_real(b.beta_m) << "\n";
    out << "beta_omega=" << format_real(b.beta_omega) << "\n";
    out << "gamma_slope=" << format_real(b.gamma_slope) << "\n";
    return out.str();
}

inline std::string gains_text(const RunConfig& cfg, const GainsResult& g) {
    using detail::row;
    const auto& b = g.bundle;
    auto limit = [](const LimitEstimate& e) {
        return format_real(e.value) + "  (" + (e.converged ? "converged" : "NOT converged") +
               ", last change " + format_real(e.last_delta) + ")";
    };
    std::string s = "ISS gains, heat equation with Dirichlet boundary control\n\n";
    s += row("schedule", detail::join_sizes(cfg.n_schedule));
    s += row("a", format_real(cfg.a));
    s += row("alpha", format_real(b.alpha));
    s += row("theta", format_real(b.theta));
    s += row("omega_hat", limit(g.limits.omega_hat));
    s += row("m_hat", format_real(b.m_hat));
    s += row("d_hat", format_real(b.d_hat));
    s += row("frac_norm_limit", limit(g.limits.frac_limit));
    s += row("mu_p", format_real(b.mu_p));
    s += row("mu_e", format_real(b.mu_e));
    s += row("K1", format_real(b.k1));
    s += row("K2", format_real(b.k2));
    s += row("kappa", format_real(b.kappa));
    s += "\n";
    s += row("beta(s, t)", format_real(b.beta_m) + " * exp(-" + format_real(b.beta_omega) + " t) * s");
    s += row("gamma(s)", format_real(b.gamma_slope) + " * s");
    return s;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const auto records = run_sweep(cfg.n_schedule, cfg.a, cfg.alpha, cfg.path(), cfg.sweep_space(), cfg.threads);
    const auto p = detail::out_path(cfg, "sweep.csv");
    emit_csv(records, p.string());
    emit_csv(records, out);
    out << "wrote " << p.string() << "\n";
    return kExitOk;
}

inline int cmd_gains(const RunConfig& cfg, std::ostream& out) {
    const auto g = compute_gains(cfg);
    const auto text = gains_text(cfg, g);
    detail::write_text(detail::out_path(cfg, "gains.txt"), text);
    detail::write_text(detail::out_path(cfg, "gains.kv"), gains_kv(cfg, g));
    out << text;
    if (!g.limits.omega_hat.converged || !g.limits.frac_limit.converged) {
        out << "warning: limits not converged within tol_omega / tol_frac; refine n_schedule\n";
    }
    return kExitOk;
}

struct ScenarioResult {
    std::string label;
    std::string kind;
    double x0_norm = 0.0;
    double u_sup = 0.0;
    IssMargin margin;
    bool asserted = true;
    std::string note;
};

inline int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const auto g = compute_gains(cfg);
    const auto& bundle = g.bundle;
    const auto sys = build_heat_dirichlet(cfg.sim_n, cfg.a, cfg.sim_space());
    const Vector zero(sys.dim(), 0.0);
    const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.h - 1e-9));
    std::vector<ScenarioResult> results;

    auto run_one = [&](const std::string& label, std::span<const double> x0, const InputSignal& u, bool asserted,
                       const std::string& note, bool write) {
        const auto traj = simulate(sys, x0, u, cfg.t_end, cfg.h, {false, label});
        const double x0_norm = weighted_state_norm(x0, sys.space);
        ScenarioResult r{label, std::string(to_string(u.kind)), x0_norm, u.sup_norm,
                         iss_margin(traj, bundle, x0_norm, u), asserted, note};
        if (write) {
            write_trajectory_csv(traj, detail::out_path(cfg, "traj_" + label + ".csv").string());
        }
        return std::make_pair(r, traj);
    };

    const auto x_sin = make_pair(cfg.sim_n).restrict([](double xi) { return std::sin(std::numbers::pi * xi); });
    results.push_back(run_one("free_sin1", x_sin, constant_input({0.0, 0.0}, cfg.u_norm), false,
                              "bound targets the limit system; the approximant decays at its own rate", true)
                          .first);
    results.push_back(run_one("const_left", zero, constant_input({1.0, 0.0}, cfg.u_norm), true, "", true).first);

    auto both = run_one("const_both", zero, constant_input({1.0, 1.0}, cfg.u_norm), false, "", true).first;
    const double steady = both.margin.min_margin - bundle.gamma(both.u_sup);
    const double eucl = bundle.gamma(std::sqrt(2.0)) + steady;
    both.note = "margin with euclidean input norm " + format_real(eucl);
    results.push_back(both);

    std::optional<std::pair<ScenarioResult, Trajectory>> worst;
    double suite_min = INFINITY;
    for (std::size_t i = 0; i < cfg.suite_size; ++i) {
        const BangBangOptions opts{steps, cfg.dwell, i % 2 == 0 ? ActiveBoundary::left : ActiveBoundary::right};
        const auto u = seeded_random_bang_bang(cfg.seed + i, opts, cfg.u_norm);
        auto res = run_one("bangbang_worst", zero, u, true, "", false);
        suite_min = std::min(suite_min, res.first.margin.min_margin);
        if (!worst || res.first.margin.min_margin < worst->first.margin.min_margin) {
            res.first.note = "seed " + std::to_string(cfg.seed + i) + " of " + std::to_string(cfg.suite_size);
            worst = std::move(res);
        }
    }
    write_trajectory_csv(worst->second, detail::out_path(cfg, "traj_bangbang_worst.csv").string());
    results.push_back(worst->first);

    bool ok = true;
    std::ostringstream kv;
    std::string text = "ISS margins  min over t of beta(|x0|, t) + gamma(|u|) - |x(t)|\n";
    text += "gamma_slope " + format_real(bundle.gamma_slope) + ", beta_omega " + format_real(bundle.beta_omega) +
            ", n = " + std::to_string(cfg.sim_n) + ", t_end = " + format_real(cfg.t_end) + ", h = " +
            format_real(cfg.h) + "\n\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-16s %-24s %-18s %-18s %-18s %-10s\n", "label", "input", "x0_norm", "u_sup",
                  "min_margin", "status");
    text += buf;
    std::string labels;
    for (const auto& r : results) {
        const bool pass = r.margin.min_margin > 0.0;
        const std::string status = r.asserted ? (pass ? "pass" : "fail") : "report";
        ok = ok && (!r.asserted || pass);
        std::snprintf(buf, sizeof(buf), "%-16s %-24s %-18s %-18s %-18s %-10s\n", r.label.c_str(), r.kind.c_str(),
                      format_real(r.x0_norm).c_str(), format_real(r.u_sup).c_str(),
                      format_real(r.margin.min_margin).c_str(), status.c_str());
        text += buf;
        if (!r.note.empty()) {
            text += "  " + r.note + "\n";
        }
        labels += (labels.empty() ? "" : ",") + r.label;
        kv << r.label << ".x0_norm=" << format_real(r.x0_norm) << "\n";
        kv << r.label << ".u_sup=" << format_real(r.u_sup) << "\n";
        kv << r.label << ".min_margin=" << format_real(r.margin.min_margin) << "\n";
        kv << r.label << ".argmin_t=" << format_real(r.margin.argmin_t) << "\n";
        kv << r.label << ".status=" << status << "\n";
    }
    kv << "suite.size=" << cfg.suite_size << "\n";
    kv << "suite.min_margin=" << format_real(suite_min) << "\n";
    kv << "beta_m=" << format_real(bundle.beta_m) << "\n";
    kv << "beta_omega=" << format_real(bundle.beta_omega) << "\n";
    kv << "gamma_slope=" << format_real(bundle.gamma_slope) << "\n";
    kv << "labels=" << labels << "\n";
    text += "\noverall: " + std::string(ok ? "pass" : "fail") + "\n";

    detail::write_text(detail::out_path(cfg, "simulate.txt"), text);
    detail::write_text(detail::out_path(cfg, "simulate.kv"), kv.str());
    out << text;
    return ok ? kExitOk : kExitFail;
}

/// close_system against the directly assembled system, entrywise.
inline DiagnosticReport closure_equivalence_report(double a, std::size_t n_max) {
    DiagnosticReport r;
    r.name = "closure_equivalence";
    Series da{"a_diff", {}}, db{"b_diff", {}}, res{"literal_residual", {}};
    bool ok = true;
    for (std::size_t n = 2; n <= n_max; ++n) {
        const auto pre = build_preclosure_heat(n, a);
        const auto closed = close_system(pre, make_space(n, {}));
        const auto direct = build_heat_dirichlet(n, a);
        r.index.push_back(static_cast<double>(n));
        da.values.push_back(max_abs_diff(closed.a_matrix.to_dense(), direct.a_matrix.to_dense()));
        db.values.push_back(max_abs_diff(closed.b_matrix, direct.b_matrix));
        res.values.push_back(literal_closure_residual(pre, closed));
        ok = ok && da.values.back() == 0.0 && db.values.back() == 0.0 && res.values.back() < 1e-12;
    }
    r.series = {std::move(da), std::move(db), std::move(res)};
    r.verdict = guard_empty(r, ok ? Verdict::pass : Verdict::fail);
    r.detail = "a = " + format_real(a);
    return r;
}

inline std::vector<double> lemma_t_grid() {
    std::vector<double> t(200);
    for (std::size_t i = 0; i < t.size(); ++i) {
        t[i] = std::pow(10.0, -4.0 + 5.0 * static_cast<double>(i) / 199.0);
    }
    t.front() = 1e-4;
    t.back() = 10.0;
    return t;
}

inline std::vector<DiagnosticReport> run_checks(const RunConfig& cfg) {
    std::vector<DiagnosticReport> reports;
    reports.push_back(closure_equivalence_report(cfg.a, 64));

    std::vector<PreClosureSystem> pre;
    for (std::size_t n : {4u, 8u, 16u, 32u, 64u}) {
        pre.push_back(build_preclosure_heat(n, cfg.a));
    }
    reports.push_back(right_inverse_gap(pre));

    const auto path = cfg.path();
    std::vector<ClosedControlSystem> family;
    for (std::size_t n : cfg.n_schedule) {
        family.push_back(build_heat_dirichlet(n, cfg.a, cfg.sweep_space()));
    }
    reports.push_back(sector_diagnostic(family, path));
    reports.push_back(resolvent_gap(cfg.a, 16, 32, path, {{1, 1.0}, {3, 0.5}}));
    reports.push_back(consistency_diagnostic(cfg.a, {16, 32, 64, 128}, default_consistency_probes()));

    const auto g = compute_gains(cfg);
    for (std::size_t n : {100u, 1000u}) {
        auto r = lemma_frac_semigroup_check(build_heat_dirichlet(n, cfg.a, cfg.sweep_space()), g.bundle,
                                            lemma_t_grid());
        r.name += "_n" + std::to_string(n);
        reports.push_back(std::move(r));
    }
    reports.push_back(trotter_kato_check(cfg.a, {{1, 1.0}}, 0.1, {16, 32, 64}));
    return reports;
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    const auto reports = run_checks(cfg);
    Verdict overall = Verdict::pass;
    std::string summary;
    std::string body;
    for (const auto& r : reports) {
        overall = worst(overall, r.verdict);
        summary += detail::row(r.name, std::string(to_string(r.verdict)));
        body += "\n" + to_text(r);
    }
    const std::string text = summary + detail::row("overall", std::string(to_string(overall))) + body;
    detail::write_text(detail::out_path(cfg, "check.txt"), text);
    out << summary << detail::row("overall", std::string(to_string(overall)));
    return overall == Verdict::fail ? kExitFail : kExitOk;
}

/// Parses a `t,norm` trajectory file.
inline std::pair<std::vector<double>, std::vector<double>> parse_trajectory_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,norm") {
        throw IoError("trajectory csv: expected header 't,norm'");
    }
    std::vector<double> ts, ns;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw IoError("trajectory csv: malformed row '" + line + "'");
        }
        try {
            ts.push_back(std::stod(line.substr(0, comma)));
            ns.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("trajectory csv: non-numeric row '" + line + "'");
        }
    }
    return {ts, ns};
}

inline int cmd_plot(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto csv_path = detail::out_path(cfg, "sweep.csv");
    const auto csv = detail::read_text(csv_path);
    if (!csv) {
        err << "plot: " << csv_path.string() << " not found; run 'issgain sweep' first\n";
        return kExitUsage;
    }
    const auto records = parse_csv(*csv);
    if (records.empty()) {
        err << "plot: " << csv_path.string() << " has no rows\n";
        return kExitUsage;
    }
    std::vector<double> ns, omega, d, frac;
    for (const auto& r : records) {
        ns.push_back(static_cast<double>(r.n));
        omega.push_back(r.omega_n);
        d.push_back(r.d_n);
        frac.push_back(r.frac_norm_n);
    }
    auto flat = [&ns](double v) { return std::make_pair(std::vector<double>{ns.front(), ns.back()},
                                                        std::vector<double>(2, v)); };
    auto chart = [&](const std::string& title, const std::string& y_label, const std::vector<double>& ys,
                     std::optional<std::pair<std::string, double>> ref) {
        Chart c{title, "n", y_label, cfg.log_x, {}};
        c.lines.push_back({y_label, ns, ys, "#1f77b4", false, true});
        if (ref) {
            auto [xs, rs] = flat(ref->second);
            c.lines.push_back({ref->first, xs, rs, "#d62728", true, false});
        }
        return render_svg(c);
    };
    const double pi2 = std::numbers::pi * std::numbers::pi;
    std::vector<std::pair<std::string, std::string>> files{
        {"fig_omegan.svg", chart("growth rate omega_n", "omega_n", omega, std::make_pair("pi^2", pi2))},
        {"fig_dn.svg", chart("sector constant D_n", "D_n", d, std::nullopt)},
        {"fig_fracnorm.svg", chart("|(-A_n)^alpha B_n|", "frac norm", frac, std::make_pair("sqrt 2", std::sqrt(2.0)))},
    };

    if (const auto sim = detail::read_text(detail::out_path(cfg, "simulate.kv"))) {
        const auto kv = detail::parse_kv(*sim);
        auto num = [&kv](const std::string& key) {
            const auto it = kv.find(key);
            if (it == kv.end()) {
                throw IoError("simulate.kv: missing key " + key);
            }
            return std::stod(it->second);
        };
        std::istringstream labels(kv.count("labels") ? kv.at("labels") : "");
        std::string label;
        while (std::getline(labels, label, ',')) {
            const auto traj_path = detail::out_path(cfg, "traj_" + label + ".csv");
            const auto traj_text = detail::read_text(traj_path);
            if (!traj_text) {
                err << "plot: " << traj_path.string() << " not found; run 'issgain simulate' first\n";
                return kExitUsage;
            }
            const auto [ts, norms] = parse_trajectory_csv(*traj_text);
            const double x0 = num(label + ".x0_norm");
            const double u = num(label + ".u_sup");
            std::vector<double> bound;
            for (double t : ts) {
                bound.push_back(num("beta_m") * std::exp(-num("beta_omega") * t) * x0 + num("gamma_slope") * u);
            }
            Chart c{"trajectory " + label, "t", "state norm", false, {}};
            c.lines.push_back({"|x(t)|", ts, norms, "#1f77b4", false, false});
            c.lines.push_back({"ISS bound", ts, bound, "#d62728", true, false});
            files.emplace_back("fig_traj_" + label + ".svg", render_svg(c));
        }
    }
    for (const auto& [name, content] : files) {
        const auto p = detail::out_path(cfg, name);
        detail::write_text(p, content);
        out << "wrote " << p.string() << "\n";
    }
    return kExitOk;
}

inline int dispatch(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (command == "sweep") {
        return cmd_sweep(cfg, out);
    }
    if (command == "gains") {
        return cmd_gains(cfg, out);
    }
    if (command == "simulate") {
        return cmd_simulate(cfg, out);
    }
    if (command == "check") {
        return cmd_check(cfg, out);
    }
    if (command == "plot") {
        return cmd_plot(cfg, out, err);
    }
    err << "unknown command '" << command << "'; expected one of sweep, gains, simulate, check, plot\n";
    return kExitUsage;
}

inline std::string describe(const ConfigError& e) {
    return e.line() > 0 ? "config error on line " + std::to_string(e.line()) + ": " + e.what()
                        : std::string("config error: ") + e.what();
}

/// Entry point: `issgain <command> [--config FILE] [--key value ...]`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certified ISS gains for the boundary-controlled heat equation", "issgain"};
    app.set_help_flag("--help", "Print this help message and exit");
    std::string command;
    std::string config_file;
    app.add_option("command", command, "sweep, gains, simulate, check or plot")->required();
    app.add_option("-c,--config", config_file, "key = value configuration file");
    std::map<std::string, std::string> flags;
    for (const auto& [key, spec] : config_keys()) {
        app.add_option("--" + key, flags[key], spec.help);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (std::find(command_names().begin(), command_names().end(), command) == command_names().end()) {
        err << "unknown command '" << command << "'; expected one of sweep, gains, simulate, check, plot\n";
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        if (!config_file.empty()) {
            const auto text = detail::read_text(config_file);
            if (!text) {
                err << "cannot read config file " << config_file << "\n";
                return kExitUsage;
            }
            cfg = parse_config(*text);
        }
        for (const auto& [key, value] : flags) {
            if (app.count("--" + key) > 0) {
                apply_setting(cfg, key, value, 0);
            }
        }
        validate(cfg);
    } catch (const ConfigError& e) {
        err << describe(e) << "\n";
        return kExitUsage;
    }

    std::error_code ec;
    if (command != "plot") {
        std::filesystem::create_directories(cfg.output_dir, ec);
    }
    if (ec) {
        err << "cannot create output directory " << cfg.output_dir << ": " << ec.message() << "\n";
        return kExitUsage;
    }
    try {
        return dispatch(command, cfg, out, err);
    } catch (const ConfigError& e) {
        err << describe(e) << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << command << " failed: " << e.what() << "\n";
        return kExitFail;
    }
}

}  // namespace issgain::cli
