#include "sesum/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace sesum {
namespace {

constexpr double width = 720, height = 480;
constexpr double ml = 72, mr = 24, mt = 24, mb = 56;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* palette(std::size_t i) {
    static const char* colors[] = {"#1f6fb4", "#d1495b", "#3e8e5a", "#8d5fb4"};
    return colors[i % 4];
}

} // namespace

SvgChart emit_svg(const std::vector<StudyRow>& rows) {
    SvgChart chart;

    std::map<std::string, std::vector<std::pair<double, double>>> series; // estimator -> (n, rate)
    double pred = 0.0;
    bool have_pred = false;
    double n_min = 0, n_max = 0, y_min = 0, y_max = 0;
    std::size_t plottable = 0;
    for (const auto& r : rows) {
        if (!std::isfinite(r.normalized_rate)) {
            chart.notices.push_back("skipped n=" + std::to_string(r.n) + " estimator=" + r.estimator +
                                    ": normalized_rate is not finite");
            continue;
        }
        const double n = double(r.n);
        if (plottable == 0) {
            n_min = n_max = n;
            y_min = y_max = r.normalized_rate;
        } else {
            n_min = std::min(n_min, n);
            n_max = std::max(n_max, n);
            y_min = std::min(y_min, r.normalized_rate);
            y_max = std::max(y_max, r.normalized_rate);
        }
        if (std::isfinite(r.predicted_rate)) {
            pred = r.predicted_rate;
            have_pred = true;
            y_min = std::min(y_min, pred);
            y_max = std::max(y_max, pred);
        }
        series[r.estimator].push_back({n, r.normalized_rate});
        ++plottable;
    }
    if (plottable < 2) {
        chart.notices.push_back("chart skipped: need at least two plottable rows, have " +
                                std::to_string(plottable));
        return chart;
    }
    if (n_max <= n_min) n_max = n_min * 2.0;
    const double pad = 0.08 * std::max(1e-12, y_max - y_min);
    y_min -= pad;
    y_max += pad;

    const double lx0 = std::log10(n_min), lx1 = std::log10(n_max);
    auto X = [&](double n) { return ml + (std::log10(n) - lx0) / (lx1 - lx0) * (width - ml - mr); };
    auto Y = [&](double v) { return mt + (y_max - v) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";

    // axes
    out << "  <line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    out << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    for (const auto& [n, _] : series.begin()->second) {
        out << "  <text x=\"" << fmt(X(n)) << "\" y=\"" << height - mb + 18
            << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(n) << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = y_min + (y_max - y_min) * i / 4.0;
        out << "  <text x=\"" << ml - 6 << "\" y=\"" << fmt(Y(v) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(v) << "</text>\n";
    }
    out << "  <text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
        << "\" font-size=\"13\" text-anchor=\"middle\">n (log scale)</text>\n";

    if (have_pred) {
        out << "  <polyline fill=\"none\" stroke=\"#777777\" stroke-dasharray=\"6,4\" points=\""
            << fmt(X(n_min)) << "," << fmt(Y(pred)) << " " << fmt(X(n_max)) << "," << fmt(Y(pred))
            << "\"/>\n";
        out << "  <text x=\"" << width - mr - 4 << "\" y=\"" << fmt(Y(pred) - 6)
            << "\" font-size=\"12\" text-anchor=\"end\">reference " << format_double(pred)
            << "</text>\n";
    }

    std::size_t idx = 0;
    for (auto& [name, pts] : series) {
        std::sort(pts.begin(), pts.end());
        out << "  <polyline fill=\"none\" stroke=\"" << palette(idx) << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) out << ' ';
            out << fmt(X(pts[i].first)) << ',' << fmt(Y(pts[i].second));
        }
        out << "\"/>\n";
        for (const auto& [n, v] : pts)
            out << "  <circle cx=\"" << fmt(X(n)) << "\" cy=\"" << fmt(Y(v))
                << "\" r=\"2.5\" fill=\"" << palette(idx) << "\"/>\n";
        out << "  <text x=\"" << ml + 10 << "\" y=\"" << mt + 16 + 16 * double(idx)
            << "\" font-size=\"12\" fill=\"" << palette(idx) << "\">" << name << "</text>\n";
        ++idx;
    }
    out << "</svg>\n";
    chart.svg = out.str();
    return chart;
}

} // namespace sesum
