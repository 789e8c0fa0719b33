#pragma once

// Text formats: trajectory CSV, static SVG plots, and the small literal
// parsers shared by the command-line front end.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bicon/adversary.hpp"
#include "bicon/cost.hpp"
#include "bicon/errors.hpp"
#include "bicon/graph.hpp"
#include "bicon/trajectory.hpp"

namespace bicon {

// 17 significant digits, %g style.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// header: t,x1,...,xn,inst_cost,cum_cost,attacked
inline void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
    const auto n = tr.states.empty() ? 0 : tr.states.front().size();
    out << 't';
    for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
    out << ",inst_cost,cum_cost,attacked\n";
    const bool has_cost = tr.inst_cost.size() == tr.size();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        out << fmt17(tr.times[k]);
        for (Eigen::Index i = 0; i < n; ++i) out << ',' << fmt17(tr.states[k][i]);
        out << ',' << (has_cost ? fmt17(tr.inst_cost[k]) : "") << ',' << (has_cost ? fmt17(tr.cum_cost[k]) : "");
        out << ',' << to_string(tr.attacks[k], ';') << '\n';
    }
}

namespace detail {

struct Panel {
    double x = 0, y = 0, w = 0, h = 0;
    double t0 = 0, t1 = 1, v0 = 0, v1 = 1;

    double px(double t) const { return x + (t - t0) / (t1 - t0) * w; }
    double py(double v) const { return y + h - (v - v0) / (v1 - v0) * h; }
};

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

inline void axes(std::ostream& out, const Panel& p, const std::string& title, const std::string& ylabel) {
    out << "<rect x=\"" << num(p.x) << "\" y=\"" << num(p.y) << "\" width=\"" << num(p.w) << "\" height=\"" << num(p.h)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(p.x + p.w / 2) << "\" y=\"" << num(p.y - 8) << "\" text-anchor=\"middle\">" << title << "</text>\n";
    out << "<text x=\"" << num(p.x + p.w / 2) << "\" y=\"" << num(p.y + p.h + 36) << "\" text-anchor=\"middle\">t</text>\n";
    out << "<text transform=\"translate(" << num(p.x - 52) << ',' << num(p.y + p.h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = p.t0 + (p.t1 - p.t0) * k / 4.0;
        const double v = p.v0 + (p.v1 - p.v0) * k / 4.0;
        out << "<text x=\"" << num(p.px(t)) << "\" y=\"" << num(p.y + p.h + 16) << "\" text-anchor=\"middle\" font-size=\"11\">" << tick(t) << "</text>\n";
        out << "<text x=\"" << num(p.x - 6) << "\" y=\"" << num(p.py(v) + 4) << "\" text-anchor=\"end\" font-size=\"11\">" << tick(v) << "</text>\n";
    }
}

inline void polyline(std::ostream& out, const Panel& p, const std::vector<double>& t, const std::vector<double>& v,
                     const std::string& colour) {
    const std::size_t stride = std::max<std::size_t>(1, t.size() / 1000);
    out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < t.size(); k += stride) out << num(p.px(t[k])) << ',' << num(p.py(v[k])) << ' ';
    out << num(p.px(t.back())) << ',' << num(p.py(v.back())) << "\"/>\n";
}

inline std::pair<double, double> padded_range(double lo, double hi) {
    if (hi - lo < 1e-12) {
        lo -= 1.0;
        hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace detail

// Two stacked panels: agent states and cumulative cost. An optional baseline
// cumulative-cost curve is drawn dashed for comparison.
inline void write_svg_plot(std::ostream& out, const Trajectory& tr, const std::vector<double>* baseline_cum = nullptr) {
    static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    if (tr.empty()) throw ContractError("cannot plot an empty trajectory");
    const double W = 720, H = 640;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" font-family=\"sans-serif\" font-size=\"13\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const auto n = tr.states.front().size();
    double lo = tr.states.front()[0], hi = lo;
    for (const auto& x : tr.states) {
        lo = std::min(lo, x.minCoeff());
        hi = std::max(hi, x.maxCoeff());
    }
    auto [v0, v1] = detail::padded_range(lo, hi);
    detail::Panel top{80, 40, 600, 230, tr.times.front(), tr.times.back(), v0, v1};
    detail::axes(out, top, "Agent states", "x_i(t)");
    std::vector<double> series(tr.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < tr.size(); ++k) series[k] = tr.states[k][i];
        detail::polyline(out, top, tr.times, series, colours[i % 8]);
    }

    if (tr.cum_cost.size() == tr.size()) {
        double chi = tr.cum_cost.back();
        if (baseline_cum && !baseline_cum->empty()) chi = std::max(chi, baseline_cum->back());
        auto [c0, c1] = detail::padded_range(0.0, chi);
        detail::Panel bottom{80, 360, 600, 230, tr.times.front(), tr.times.back(), c0, c1};
        detail::axes(out, bottom, "Cumulative cost", "J(t)");
        detail::polyline(out, bottom, tr.times, tr.cum_cost, "black");
        if (baseline_cum && baseline_cum->size() == tr.size()) {
            std::ostringstream dashed;
            detail::polyline(dashed, bottom, tr.times, *baseline_cum, "gray");
            std::string s = dashed.str();
            s.insert(s.find("/>"), " stroke-dasharray=\"6,4\"");
            out << s;
        }
    }
    out << "</svg>\n";
}

// "1,2,-3.5" or whitespace separated.
inline std::vector<double> parse_real_list(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::vector<double> out;
    for (const auto& tok : detail::split_ws(s)) {
        const auto v = detail::parse_real(tok);
        if (!v) throw ValidationError("not a real number: '" + tok + "'");
        out.push_back(*v);
    }
    return out;
}

inline Link parse_link(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) throw ValidationError("link must look like i-j: '" + std::string(text) + "'");
    const auto i = detail::parse_int(std::string(detail::trim(text.substr(0, dash))));
    const auto j = detail::parse_int(std::string(detail::trim(text.substr(dash + 1))));
    if (!i || !j) throw ValidationError("link must look like i-j: '" + std::string(text) + "'");
    return Link(static_cast<int>(*i), static_cast<int>(*j));
}

// none | fixed:i-j[,i-j...] | random:<seed> | greedy
inline AttackStrategy parse_strategy(std::string_view spec, int alpha, AttackMode mode) {
    const auto colon = spec.find(':');
    const std::string kind(spec.substr(0, colon));
    const std::string arg = colon == std::string_view::npos ? "" : std::string(spec.substr(colon + 1));
    if (kind == "none" && arg.empty()) return AttackStrategy::none();
    if (kind == "greedy" && arg.empty()) return AttackStrategy::greedy(alpha, mode);
    if (kind == "random") {
        char* end = nullptr;
        const auto seed = std::strtoull(arg.c_str(), &end, 10);
        if (arg.empty() || *end != '\0') throw ValidationError("random strategy needs an integer seed: '" + std::string(spec) + "'");
        return AttackStrategy::random(seed, alpha, mode);
    }
    if (kind == "fixed") {
        LinkSet links;
        std::string rest = arg;
        std::size_t pos = 0;
        while (pos <= rest.size()) {
            const auto comma = rest.find(',', pos);
            const auto piece = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            links.insert(parse_link(piece));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        auto s = AttackStrategy::fixed(std::move(links));
        s.mode = mode;
        return s;
    }
    throw ValidationError("unknown strategy '" + std::string(spec) + "'");
}

inline AttackMode parse_mode(std::string_view s) {
    if (s == "permanent") return AttackMode::permanent;
    if (s == "per-epoch") return AttackMode::per_epoch;
    throw ValidationError("mode must be permanent or per-epoch, got '" + std::string(s) + "'");
}

// constant:<c> | exp:<lambda>
inline Kernel parse_kernel(std::string_view spec) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) throw ValidationError("kernel must be constant:<c> or exp:<lambda>");
    const std::string kind(spec.substr(0, colon));
    const auto v = detail::parse_real(std::string(spec.substr(colon + 1)));
    if (!v) throw ValidationError("kernel parameter is not a real: '" + std::string(spec) + "'");
    if (kind == "constant") return Kernel::constant(*v);
    if (kind == "exp") return Kernel::exponential(*v);
    throw ValidationError("unknown kernel '" + kind + "'");
}

// Flat "key = value" text; '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::string_view text) {
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        if (key.empty()) throw ParseError(line_no, "empty key");
        out[key] = std::string(detail::trim(line.substr(eq + 1)));
    }
    return out;
}

}  // namespace bicon
