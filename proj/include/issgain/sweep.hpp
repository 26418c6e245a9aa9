#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "issgain/diagnostics.hpp"
#include "issgain/errors.hpp"
#include "issgain/gains.hpp"
#include "issgain/systems.hpp"

namespace issgain {

/// One row of the resolution sweep.
struct SweepRecord {
    std::size_t n = 0;
    double omega_n = 0.0;
    double d_n = 0.0;
    double frac_norm_n = 0.0;

    bool operator==(const SweepRecord&) const = default;
};

enum class LimitRule { last_value, supremum };

struct LimitEstimate {
    double value = 0.0;
    double last_delta = 0.0;
    bool converged = false;
    LimitRule rule = LimitRule::last_value;
};

struct SweepLimits {
    LimitEstimate omega_hat;
    LimitEstimate d_hat;
    LimitEstimate frac_limit;
};

inline SweepRecord sweep_record(std::size_t n, double a, double alpha, const PathSpec& path,
                                const SpaceConfig& space_cfg) {
    const auto sys = build_heat_dirichlet(n, a, space_cfg);
    const auto spec = system_spectrum(sys);
    return {n, growth_bound(spec).omega, sector_bound(spec, path).d, frac_control_norm(sys, spec, alpha)};
}

/// Per-n constants over an increasing schedule. Work items run on up to
/// `threads` workers; output order always follows the schedule.
inline std::vector<SweepRecord> run_sweep(const std::vector<std::size_t>& schedule, double a, double alpha,
                                          const PathSpec& path, const SpaceConfig& space_cfg,
                                          std::size_t threads = 1) {
    if (schedule.empty()) {
        throw DomainError("run_sweep: empty schedule");
    }
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (schedule[i] < 2 || (i > 0 && schedule[i] <= schedule[i - 1])) {
            throw DomainError("run_sweep: schedule must be strictly increasing with every n >= 2");
        }
    }
    std::vector<SweepRecord> records(schedule.size());
    std::atomic<std::size_t> next{0};
    std::mutex failure_lock;
    std::optional<std::size_t> failed_index;
    std::string failure;

    auto worker = [&] {
        for (std::size_t i = next++; i < schedule.size(); i = next++) {
            try {
                records[i] = sweep_record(schedule[i], a, alpha, path, space_cfg);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_lock);
                if (!failed_index || i < *failed_index) {
                    failed_index = i;
                    failure = e.what();
                }
            }
        }
    };
    const std::size_t width = std::clamp<std::size_t>(threads, 1, schedule.size());
    if (width == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < width; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failed_index) {
        throw Error("run_sweep: n = " + std::to_string(schedule[*failed_index]) + " failed: " + failure);
    }
    return records;
}

/// Limits of the sweep: ω̂ and the fractional norm take the last value
/// (converged when the last step moved by at most the tolerance), D̂ is the
/// supremum scaled by μ_e·μ_p.
///
/// With `richardson`, ω̂ is extrapolated from the last two records assuming
/// an O(n⁻²) error; the last two n must then differ by a factor of 2.
inline SweepLimits aggregate(const std::vector<SweepRecord>& records, double tol_omega, double tol_frac,
                             double mu_p = 1.0, double mu_e = 1.0, bool richardson = false) {
    if (records.size() < 2) {
        throw DomainError("aggregate: need at least 2 records");
    }
    const auto& last = records.back();
    const auto& prev = records[records.size() - 2];
    SweepLimits out;

    out.omega_hat.rule = LimitRule::last_value;
    out.omega_hat.last_delta = std::abs(last.omega_n - prev.omega_n);
    out.omega_hat.converged = out.omega_hat.last_delta <= tol_omega;
    out.omega_hat.value = last.omega_n;
    if (richardson) {
        if (last.n != 2 * prev.n) {
            throw DomainError("aggregate: Richardson extrapolation needs the last two n in ratio 2");
        }
        out.omega_hat.value = last.omega_n + (last.omega_n - prev.omega_n) / 3.0;
    }

    out.frac_limit.rule = LimitRule::last_value;
    out.frac_limit.last_delta = std::abs(last.frac_norm_n - prev.frac_norm_n);
    out.frac_limit.converged = out.frac_limit.last_delta <= tol_frac;
    out.frac_limit.value = last.frac_norm_n;

    double sup = 0.0;
    for (const auto& r : records) {
        sup = std::max(sup, r.d_n);
    }
    out.d_hat.rule = LimitRule::supremum;
    out.d_hat.value = mu_e * mu_p * sup;
    out.d_hat.last_delta = std::abs(last.d_n - prev.d_n);
    out.d_hat.converged = std::isfinite(sup);
    return out;
}

inline constexpr const char* kSweepCsvHeader = "n,omegan,Dn,AnalphaBnnorm";

/// Writes the sweep table; returns the number of bytes written.
inline std::size_t emit_csv(const std::vector<SweepRecord>& records, std::ostream& out) {
    if (records.empty()) {
        throw DomainError("emit_csv: no records");
    }
    std::string text = kSweepCsvHeader;
    text += '\n';
    for (const auto& r : records) {
        text += std::to_string(r.n);
        for (double v : {r.omega_n, r.d_n, r.frac_norm_n}) {
            text += ',';
            text += format_real(v);
        }
        text += '\n';
    }
    out << text;
    if (!out) {
        throw IoError("emit_csv: write failed");
    }
    return text.size();
}

inline std::size_t emit_csv(const std::vector<SweepRecord>& records, const std::string& path) {
    if (records.empty()) {
        throw DomainError("emit_csv: no records");
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw IoError("emit_csv: cannot open " + path + " for writing");
    }
    return emit_csv(records, file);
}

inline std::vector<SweepRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kSweepCsvHeader) {
        throw IoError("parse_csv: missing or wrong header");
    }
    std::vector<SweepRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) {
            cells.push_back(cell);
        }
        if (cells.size() != 4) {
            throw IoError("parse_csv: line " + std::to_string(line_no) + " does not have 4 fields");
        }
        try {
            records.push_back({static_cast<std::size_t>(std::stoull(cells[0])), std::stod(cells[1]),
                               std::stod(cells[2]), std::stod(cells[3])});
        } catch (const std::exception&) {
            throw IoError("parse_csv: line " + std::to_string(line_no) + " is not numeric");
        }
    }
    return records;
}

inline std::vector<std::size_t> default_schedule() { return {250, 500, 1000, 2000, 4000}; }

}  // namespace issgain
