#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "issgain/errors.hpp"
#include "issgain/gains.hpp"
#include "issgain/simulate.hpp"
#include "issgain/sweep.hpp"

namespace issgain::cli {

struct RunConfig {
    std::vector<std::size_t> n_schedule = default_schedule();
    double a = 1.0;
    double alpha = 0.5;
    double theta = kDefaultTheta;
    double lambda_min = 1e-4;
    double lambda_max = 1e4;
    std::size_t lambda_count = 400;
    double weight_exponent = 2.0;
    double sim_weight_exponent = 1.0;
    ColNorm u_norm = ColNorm::max;
    double mu_p = 1.0;
    double mu_e = 1.0;
    double tol_omega = 1e-4;
    double tol_frac = 1e-3;
    bool richardson = false;
    std::size_t sim_n = 1000;
    double t_end = 3.0;
    double h = 0.01;
    std::uint64_t seed = 20240611;
    std::size_t suite_size = 50;
    std::size_t dwell = 10;
    std::size_t threads = 1;
    bool log_x = true;
    std::string output_dir = ".";

    PathSpec path() const { return make_log_path(lambda_min, lambda_max, lambda_count); }
    SpaceConfig sweep_space() const { return {weight_exponent, u_norm}; }
    SpaceConfig sim_space() const { return {sim_weight_exponent, u_norm}; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double to_real(std::string_view key, std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw ConfigError(std::string(key) + ": not a finite number: '" + std::string(text) + "'", line);
    }
    return v;
}

inline std::uint64_t to_unsigned(std::string_view key, std::string_view text, std::size_t line) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError(std::string(key) + ": not a nonnegative integer: '" + std::string(text) + "'", line);
    }
    return v;
}

inline bool to_bool(std::string_view key, std::string_view text, std::size_t line) {
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'", line);
}

inline void require(bool ok, std::string_view key, const std::string& what, std::size_t line) {
    if (!ok) {
        throw ConfigError(std::string(key) + ": " + what, line);
    }
}

inline std::vector<std::size_t> to_schedule(std::string_view key, std::string_view text, std::size_t line) {
    std::vector<std::size_t> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        const auto n = to_unsigned(key, item, line);
        require(n >= 2, key, "every n must be at least 2, got " + std::to_string(n), line);
        require(out.empty() || n > out.back(), key, "schedule must be strictly increasing", line);
        out.push_back(static_cast<std::size_t>(n));
        if (comma == std::string_view::npos) {
            break;
        }
        text.remove_prefix(comma + 1);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;

struct KeySpec {
    std::string help;
    Setter set;
};

}  // namespace detail

/// Every accepted key with its setter. Setters validate the value alone;
/// relations between keys are checked by validate().
inline const std::map<std::string, detail::KeySpec, std::less<>>& config_keys() {
    using namespace detail;
    static const std::map<std::string, KeySpec, std::less<>> keys = [] {
        std::map<std::string, KeySpec, std::less<>> k;
        auto real_key = [&k](const std::string& name, const std::string& help, double RunConfig::*field,
                             std::function<bool(double)> ok, const std::string& range) {
            k[name] = {help, [name, field, ok, range](RunConfig& c, std::string_view v, std::size_t line) {
                           const double x = to_real(name, v, line);
                           require(ok(x), name, "must be " + range + ", got " + std::string(v), line);
                           c.*field = x;
                       }};
        };
        auto count_key = [&k](const std::string& name, const std::string& help, std::size_t RunConfig::*field,
                              std::size_t lo, std::size_t hi) {
            k[name] = {help, [name, field, lo, hi](RunConfig& c, std::string_view v, std::size_t line) {
                           const auto x = to_unsigned(name, v, line);
                           require(x >= lo && x <= hi, name,
                                   "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                                       std::string(v),
                                   line);
                           c.*field = static_cast<std::size_t>(x);
                       }};
        };
        auto positive = [](double x) { return x > 0.0; };
        auto exponent = [](double x) { return x == 1.0 || x == 2.0; };

        k["n_schedule"] = {"comma-separated interval counts",
                           [](RunConfig& c, std::string_view v, std::size_t line) {
                               c.n_schedule = to_schedule("n_schedule", v, line);
                           }};
        real_key("a", "diffusion coefficient", &RunConfig::a, positive, "positive");
        real_key("alpha", "fractional power", &RunConfig::alpha, [](double x) { return x > 0.0 && x < 1.0; },
                 "in (0, 1)");
        real_key("theta", "sector angle", &RunConfig::theta,
                 [](double x) { return x > std::numbers::pi / 2 && x < std::numbers::pi; }, "in (pi/2, pi)");
        real_key("lambda_min", "smallest resolvent sample", &RunConfig::lambda_min, positive, "positive");
        real_key("lambda_max", "largest resolvent sample", &RunConfig::lambda_max, positive, "positive");
        count_key("lambda_count", "number of resolvent samples", &RunConfig::lambda_count, 2, 1000000);
        real_key("weight_exponent", "state weight exponent for the sweep", &RunConfig::weight_exponent, exponent,
                 "1 or 2");
        real_key("sim_weight_exponent", "state weight exponent for simulation", &RunConfig::sim_weight_exponent,
                 exponent, "1 or 2");
        k["u_norm"] = {"input norm: max or euclidean", [](RunConfig& c, std::string_view v, std::size_t line) {
                           if (v == "max") {
                               c.u_norm = ColNorm::max;
                           } else if (v == "euclidean") {
                               c.u_norm = ColNorm::euclidean;
                           } else {
                               throw ConfigError("u_norm: expected max or euclidean, got '" + std::string(v) + "'",
                                                 line);
                           }
                       }};
        real_key("mu_p", "bound on the restriction norms", &RunConfig::mu_p, positive, "positive");
        real_key("mu_e", "bound on the extension norms", &RunConfig::mu_e, positive, "positive");
        real_key("tol_omega", "convergence tolerance for omega", &RunConfig::tol_omega, positive, "positive");
        real_key("tol_frac", "convergence tolerance for the fractional norm", &RunConfig::tol_frac, positive,
                 "positive");
        k["richardson"] = {"extrapolate omega from the last two n",
                           [](RunConfig& c, std::string_view v, std::size_t line) {
                               c.richardson = to_bool("richardson", v, line);
                           }};
        count_key("sim_n", "interval count for simulation", &RunConfig::sim_n, 2, 100000);
        real_key("t_end", "simulation horizon", &RunConfig::t_end, positive, "positive");
        real_key("h", "simulation step", &RunConfig::h, positive, "positive");
        k["seed"] = {"base seed of the random input suite", [](RunConfig& c, std::string_view v, std::size_t line) {
                         c.seed = to_unsigned("seed", v, line);
                     }};
        count_key("suite_size", "number of random inputs", &RunConfig::suite_size, 1, 100000);
        count_key("dwell", "steps per random input level", &RunConfig::dwell, 1, 10000000);
        count_key("threads", "sweep worker threads", &RunConfig::threads, 1, 256);
        k["log_x"] = {"log-scaled x axis for sweep charts", [](RunConfig& c, std::string_view v, std::size_t line) {
                          c.log_x = to_bool("log_x", v, line);
                      }};
        k["output_dir"] = {"directory for all outputs", [](RunConfig& c, std::string_view v, std::size_t line) {
                               require(!v.empty(), "output_dir", "must not be empty", line);
                               c.output_dir = std::string(v);
                           }};
        return k;
    }();
    return keys;
}

/// Checks between keys. `lines` maps a key to the line that set it.
inline void validate(const RunConfig& c, const std::map<std::string, std::size_t, std::less<>>& lines = {}) {
    auto line_of = [&lines](std::string_view key) {
        const auto it = lines.find(key);
        return it == lines.end() ? std::size_t{0} : it->second;
    };
    detail::require(c.lambda_max > c.lambda_min, "lambda_max", "must exceed lambda_min", line_of("lambda_max"));
    detail::require(c.h <= c.t_end, "h", "must not exceed t_end", line_of("h"));
    detail::require(c.t_end / c.h <= kMaxSimulationSteps, "h", "t_end/h exceeds the step budget", line_of("h"));
}

inline void apply_setting(RunConfig& c, std::string_view key, std::string_view value, std::size_t line) {
    const auto& keys = config_keys();
    const auto it = keys.find(key);
    if (it == keys.end()) {
        throw ConfigError("unknown key '" + std::string(key) + "'", line);
    }
    it->second.set(c, value, line);
}

/// `key = value` lines; `#` starts a comment; blank lines are ignored.
/// Unknown or repeated keys and malformed lines are errors.
inline RunConfig parse_config(std::string_view source) {
    RunConfig c;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::size_t line_no = 0;
    while (!source.empty() || line_no == 0) {
        ++line_no;
        const auto nl = source.find('\n');
        auto line = source.substr(0, nl);
        source = nl == std::string_view::npos ? std::string_view{} : source.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("malformed line, expected key = value", line_no);
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("malformed line, missing key", line_no);
        }
        if (seen.count(key) != 0) {
            throw ConfigError("duplicate key '" + std::string(key) + "'", line_no);
        }
        apply_setting(c, key, value, line_no);
        seen.emplace(std::string(key), line_no);
    }
    validate(c, seen);
    return c;
}

}  // namespace issgain::cli
