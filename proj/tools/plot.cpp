#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fairrank::cli {
namespace {

constexpr double kPanelWidth = 360.0;
constexpr double kPanelHeight = 260.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginTop = 40.0;
constexpr double kGap = 84.0;
constexpr double kLegendRow = 20.0;

struct Panel {
    std::size_t metric;
    const char* title;
};

constexpr Panel kPanels[] = {
    {6, "Exposure difference"},
    {3, "Error difference"},
    {0, "Overall error"},
};

std::string colour(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};
    if (i < std::size(palette)) {
        return palette[i];
    }
    // Golden-angle hues past the palette keep later series apart.
    const double hue = std::fmod(static_cast<double>(i) * 137.508, 360.0);
    std::ostringstream s;
    s << "hsl(" << std::lround(hue) << ",65%,45%)";
    return s.str();
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

// Tick step from {1, 2, 5} x 10^k giving about five ticks.
double nice_step(double span) {
    const double raw = span / 5.0;
    const double base = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * base >= raw) {
            return m * base;
        }
    }
    return 10.0 * base;
}

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

} // namespace

std::string render_plot(std::span<const PlotSeries> series) {
    if (series.empty()) {
        throw InvalidInput("plot needs at least one table");
    }
    for (const auto& s : series) {
        if (s.rows.empty()) {
            throw InvalidInput("table '" + s.label + "' has no rows");
        }
    }

    double x_lo = static_cast<double>(series.front().rows.front().iteration);
    double x_hi = x_lo;
    for (const auto& s : series) {
        for (const auto& r : s.rows) {
            x_lo = std::min(x_lo, static_cast<double>(r.iteration));
            x_hi = std::max(x_hi, static_cast<double>(r.iteration));
        }
    }
    if (x_hi == x_lo) {
        x_lo -= 1.0;
        x_hi += 1.0;
    }

    const double width = kMarginLeft + 3 * kPanelWidth + 2 * kGap + 24.0;
    const double legend_top = kMarginTop + kPanelHeight + 48.0;
    const double height = legend_top + kLegendRow * static_cast<double>(series.size()) + 16.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < std::size(kPanels); ++p) {
        const Panel& panel = kPanels[p];
        const double left = kMarginLeft + static_cast<double>(p) * (kPanelWidth + kGap);
        const double top = kMarginTop;

        double y_lo = 0.0; // the optimum guide at 0 is always visible
        double y_hi = 0.0;
        for (const auto& s : series) {
            for (const auto& r : s.rows) {
                y_lo = std::min(y_lo, r.metrics[panel.metric].min);
                y_hi = std::max(y_hi, r.metrics[panel.metric].max);
            }
        }
        if (y_hi - y_lo < 1e-12) {
            y_hi = y_lo + 1.0;
        }
        const double pad = 0.05 * (y_hi - y_lo);
        y_lo -= pad;
        y_hi += pad;

        auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * kPanelWidth; };
        auto py = [&](double y) { return top + (y_hi - y) / (y_hi - y_lo) * kPanelHeight; };

        svg << "<g class=\"panel\">\n<text x=\"" << num(left + kPanelWidth / 2) << "\" y=\"" << num(top - 14)
            << "\" text-anchor=\"middle\" font-size=\"13\">" << panel.title << "</text>\n";
        svg << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(kPanelWidth)
            << "\" height=\"" << num(kPanelHeight) << "\" fill=\"none\" stroke=\"#333\"/>\n";

        const double ystep = nice_step(y_hi - y_lo);
        for (double y = std::ceil(y_lo / ystep) * ystep; y <= y_hi + 1e-12; y += ystep) {
            const double v = std::abs(y) < ystep * 1e-9 ? 0.0 : y;
            svg << "<line x1=\"" << num(left - 4) << "\" x2=\"" << num(left) << "\" y1=\"" << num(py(v))
                << "\" y2=\"" << num(py(v)) << "\" stroke=\"#333\"/>"
                << "<text x=\"" << num(left - 7) << "\" y=\"" << num(py(v) + 4)
                << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
        }
        const double xstep = nice_step(x_hi - x_lo);
        for (double x = std::ceil(x_lo / xstep) * xstep; x <= x_hi + 1e-9; x += xstep) {
            svg << "<line x1=\"" << num(px(x)) << "\" x2=\"" << num(px(x)) << "\" y1=\""
                << num(top + kPanelHeight) << "\" y2=\"" << num(top + kPanelHeight + 4)
                << "\" stroke=\"#333\"/>"
                << "<text x=\"" << num(px(x)) << "\" y=\"" << num(top + kPanelHeight + 16)
                << "\" text-anchor=\"middle\">" << num(x) << "</text>\n";
        }
        svg << "<text x=\"" << num(left + kPanelWidth / 2) << "\" y=\"" << num(top + kPanelHeight + 32)
            << "\" text-anchor=\"middle\">Iteration</text>\n";

        svg << "<line class=\"optimum\" x1=\"" << num(left) << "\" x2=\"" << num(left + kPanelWidth)
            << "\" y1=\"" << num(py(0.0)) << "\" y2=\"" << num(py(0.0))
            << "\" stroke=\"#555\" stroke-dasharray=\"5,4\"/>\n";

        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& rows = series[i].rows;
            const std::string c = colour(i);
            svg << "<polygon class=\"band\" fill=\"" << c << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
            for (const auto& r : rows) {
                svg << num(px(static_cast<double>(r.iteration))) << ',' << num(py(r.metrics[panel.metric].max)) << ' ';
            }
            for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
                svg << num(px(static_cast<double>(it->iteration))) << ',' << num(py(it->metrics[panel.metric].min)) << ' ';
            }
            svg << "\"/>\n";
            svg << "<polyline class=\"median\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.8\" points=\"";
            for (const auto& r : rows) {
                svg << num(px(static_cast<double>(r.iteration))) << ',' << num(py(r.metrics[panel.metric].median)) << ' ';
            }
            svg << "\"/>\n";
        }
        svg << "</g>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double y = legend_top + kLegendRow * static_cast<double>(i);
        svg << "<rect class=\"legend-entry\" x=\"" << num(kMarginLeft) << "\" y=\"" << num(y - 9) << "\" width=\"18\" height=\"10\" fill=\""
            << colour(i) << "\"/><text x=\"" << num(kMarginLeft + 26) << "\" y=\"" << num(y) << "\">"
            << escape(series[i].label) << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

} // namespace fairrank::cli
