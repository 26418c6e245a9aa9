#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "issgain/errors.hpp"

namespace issgain {

enum class Verdict { pass, warn, fail };

inline std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::pass:
            return "pass";
        case Verdict::warn:
            return "warn";
        case Verdict::fail:
            return "fail";
    }
    return "fail";
}

/// Fixed 10-significant-digit rendering used by every text output.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%#.10g", v);
    return buf;
}

struct Series {
    std::string label;
    std::vector<double> values;
};

/// Outcome of one computable check, indexed by resolution n (or by sample
/// position for checks over a t-grid).
struct DiagnosticReport {
    std::string name;
    std::vector<double> index;
    std::vector<Series> series;
    Verdict verdict = Verdict::fail;
    std::string detail;

    /// Primary series.
    const std::vector<double>& values() const {
        static const std::vector<double> empty;
        return series.empty() ? empty : series.front().values;
    }

    const Series* find(std::string_view label) const {
        for (const auto& s : series) {
            if (s.label == label) {
                return &s;
            }
        }
        return nullptr;
    }
};

/// A pass verdict is downgraded to fail when there is nothing to judge.
inline Verdict guard_empty(const DiagnosticReport& r, Verdict v) {
    if (v == Verdict::pass && r.values().empty()) {
        return Verdict::fail;
    }
    return v;
}

inline Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

inline std::string to_text(const DiagnosticReport& r) {
    std::ostringstream out;
    out << "== " << r.name << ": " << to_string(r.verdict) << "\n";
    if (!r.detail.empty()) {
        out << "   " << r.detail << "\n";
    }
    out << "   index";
    for (const auto& s : r.series) {
        out << "  " << s.label;
    }
    out << "\n";
    for (std::size_t i = 0; i < r.index.size(); ++i) {
        out << "   " << format_real(r.index[i]);
        for (const auto& s : r.series) {
            out << "  " << (i < s.values.size() ? format_real(s.values[i]) : std::string("-"));
        }
        out << "\n";
    }
    return out.str();
}

inline std::string join_reals(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += format_real(values[i]);
    }
    return out;
}

/// key=value lines, every key prefixed with the report name.
inline std::string to_kv(const DiagnosticReport& r) {
    std::ostringstream out;
    out << r.name << ".verdict=" << to_string(r.verdict) << "\n";
    out << r.name << ".index=" << join_reals(r.index) << "\n";
    for (const auto& s : r.series) {
        out << r.name << "." << s.label << "=" << join_reals(s.values) << "\n";
    }
    return out.str();
}

}  // namespace issgain
