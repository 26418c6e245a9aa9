#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <vector>

#include "issgain/errors.hpp"

namespace issgain::cli {

struct Line {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
    std::string color = "#1f77b4";
    bool dashed = false;
    bool markers = false;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    std::vector<Line> lines;
    int width = 640;
    int height = 420;
};

namespace detail {

inline std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '&':
                out += "&amp;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

/// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
inline std::vector<double> linear_ticks(double lo, double hi, int target = 5) {
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) {
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

inline std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    for (int e = static_cast<int>(std::floor(std::log10(lo))); e <= static_cast<int>(std::ceil(std::log10(hi)));
         ++e) {
        for (double m : {1.0, 2.0, 5.0}) {
            const double t = m * std::pow(10.0, e);
            if (t >= lo * (1 - 1e-12) && t <= hi * (1 + 1e-12)) {
                ticks.push_back(t);
            }
        }
    }
    return ticks;
}

}  // namespace detail

/// Static polyline chart with axes, ticks and a legend.
inline std::string render_svg(const Chart& chart) {
    double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
    for (const auto& line : chart.lines) {
        if (line.xs.size() != line.ys.size()) {
            throw DimensionError("render_svg: line '" + line.label + "' has mismatched x and y lengths");
        }
        for (std::size_t i = 0; i < line.xs.size(); ++i) {
            if (chart.log_x && !(line.xs[i] > 0.0)) {
                throw DomainError("render_svg: log x axis needs positive x values");
            }
            x_lo = std::min(x_lo, line.xs[i]);
            x_hi = std::max(x_hi, line.xs[i]);
            y_lo = std::min(y_lo, line.ys[i]);
            y_hi = std::max(y_hi, line.ys[i]);
        }
    }
    if (!std::isfinite(x_lo) || !std::isfinite(y_lo) || !std::isfinite(y_hi)) {
        throw DomainError("render_svg: chart '" + chart.title + "' has no finite data");
    }
    if (x_hi == x_lo) {
        x_lo = chart.log_x ? x_lo / 2 : x_lo - 1;
        x_hi = chart.log_x ? x_hi * 2 : x_hi + 1;
    }
    // Series flat to within 1e-4 relative are drawn flat.
    const double min_span = 1e-4 * std::max({std::abs(y_lo), std::abs(y_hi), 1e-300});
    if (y_hi - y_lo < min_span) {
        const double mid = 0.5 * (y_lo + y_hi);
        y_lo = mid - 0.5 * min_span;
        y_hi = mid + 0.5 * min_span;
    }
    const double y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    const double left = 90, right = 20, top = 56, bottom = 60;
    const double pw = chart.width - left - right;
    const double ph = chart.height - top - bottom;
    auto tx = [&](double x) {
        const double f = chart.log_x ? (std::log(x) - std::log(x_lo)) / (std::log(x_hi) - std::log(x_lo))
                                     : (x - x_lo) / (x_hi - x_lo);
        return left + f * pw;
    };
    auto ty = [&](double y) { return top + (1 - (y - y_lo) / (y_hi - y_lo)) * ph; };
    auto px = [](double v) { return detail::fmt("%.2f", v); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(chart.width) + "\" height=\"" +
         std::to_string(chart.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + px(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::escape(chart.title) + "</text>\n";
    s += "<rect x=\"" + px(left) + "\" y=\"" + px(top) + "\" width=\"" + px(pw) + "\" height=\"" + px(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    const auto xt = chart.log_x ? detail::log_ticks(x_lo, x_hi) : detail::linear_ticks(x_lo, x_hi);
    for (double t : xt) {
        const double x = tx(t);
        s += "<line x1=\"" + px(x) + "\" y1=\"" + px(top + ph) + "\" x2=\"" + px(x) + "\" y2=\"" + px(top + ph + 5) +
             "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + px(x) + "\" y=\"" + px(top + ph + 18) + "\" text-anchor=\"middle\">" +
             detail::fmt("%g", t) + "</text>\n";
    }
    const auto yt = detail::linear_ticks(y_lo, y_hi);
    const double y_step = yt.size() > 1 ? yt[1] - yt[0] : 1.0;
    const int digits = std::max(0, static_cast<int>(-std::floor(std::log10(y_step))));
    char spec[16];
    std::snprintf(spec, sizeof(spec), "%%.%df", std::min(digits, 12));
    for (double t : yt) {
        const double y = ty(t);
        s += "<line x1=\"" + px(left - 5) + "\" y1=\"" + px(y) + "\" x2=\"" + px(left + pw) + "\" y2=\"" + px(y) +
             "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + px(left - 8) + "\" y=\"" + px(y + 4) + "\" text-anchor=\"end\">" + detail::fmt(spec, t) +
             "</text>\n";
    }
    s += "<text x=\"" + px(left + pw / 2) + "\" y=\"" + px(chart.height - 15.0) + "\" text-anchor=\"middle\">" +
         detail::escape(chart.x_label) + "</text>\n";
    s += "<text x=\"16\" y=\"" + px(top + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         px(top + ph / 2) + ")\">" + detail::escape(chart.y_label) + "</text>\n";

    for (std::size_t k = 0; k < chart.lines.size(); ++k) {
        const auto& line = chart.lines[k];
        s += "<polyline fill=\"none\" stroke=\"" + line.color + "\" stroke-width=\"1.5\"";
        if (line.dashed) {
            s += " stroke-dasharray=\"6 4\"";
        }
        s += " points=\"";
        for (std::size_t i = 0; i < line.xs.size(); ++i) {
            s += (i ? " " : "") + px(tx(line.xs[i])) + "," + px(ty(line.ys[i]));
        }
        s += "\"/>\n";
        if (line.markers) {
            for (std::size_t i = 0; i < line.xs.size(); ++i) {
                s += "<circle cx=\"" + px(tx(line.xs[i])) + "\" cy=\"" + px(ty(line.ys[i])) + "\" r=\"3\" fill=\"" +
                     line.color + "\"/>\n";
            }
        }
        const double lx = left + 160 * static_cast<double>(k);
        const double ly = top - 10;
        s += "<line x1=\"" + px(lx) + "\" y1=\"" + px(ly - 4) + "\" x2=\"" + px(lx + 24) + "\" y2=\"" +
             px(ly - 4) + "\" stroke=\"" + line.color + "\" stroke-width=\"2\"" +
             (line.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        s += "<text x=\"" + px(lx + 30) + "\" y=\"" + px(ly) + "\">" + detail::escape(line.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace issgain::cli
