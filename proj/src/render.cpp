#include "catex/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "catex/errors.hpp"

namespace catex {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape_xml(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool empty() const { return !(lo <= hi); }
    // widen degenerate or empty ranges so the projection below is well defined
    void regularize() {
        if (empty()) {
            lo = 0.0;
            hi = 1.0;
        } else if (lo == hi) {
            const double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const std::string& title, const std::string& x_label,
                              const std::string& y_label, int width, int height) {
    if (width < 200 || height < 150) throw InvalidInput("render: chart too small");
    Range xr, yr;
    bool any_point = false;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw InvalidInput("render: series '" + s.label + "' x/y length mismatch");
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xr.include(s.x[i]);
                yr.include(s.y[i]);
                any_point = true;
            }
    }
    if (!any_point) throw InvalidInput("render: no finite data points");
    xr.regularize();
    yr.regularize();
    // breathing room above and below the data
    const double ypad = (yr.hi - yr.lo) * 0.05;
    yr.lo -= ypad;
    yr.hi += ypad;

    const double ml = 70, mr = 20, mt = title.empty() ? 20 : 44, mb = 48;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto px = [&](double x) { return ml + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return mt + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty())
        svg << "<text x=\"" << width / 2.0 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-size=\"16\">" << escape_xml(title) << "</text>\n";

    // gridlines and tick labels, 6 divisions each way
    const int ticks = 6;
    svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
    for (int i = 0; i <= ticks; ++i) {
        const double gx = ml + pw * i / ticks;
        const double gy = mt + ph * i / ticks;
        svg << "<line x1=\"" << fmt(gx) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(gx)
            << "\" y2=\"" << fmt(mt + ph) << "\"/>\n"
            << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(gy) << "\" x2=\""
            << fmt(ml + pw) << "\" y2=\"" << fmt(gy) << "\"/>\n";
    }
    svg << "</g>\n<g fill=\"#333333\">\n";
    for (int i = 0; i <= ticks; ++i) {
        const double xv = xr.lo + (xr.hi - xr.lo) * i / ticks;
        const double yv = yr.lo + (yr.hi - yr.lo) * i / ticks;
        svg << "<text x=\"" << fmt(ml + pw * i / ticks) << "\" y=\"" << fmt(mt + ph + 16)
            << "\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n"
            << "<text x=\"" << fmt(ml - 6) << "\" y=\"" << fmt(mt + ph * (ticks - i) / ticks + 4)
            << "\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    svg << "</g>\n";
    if (!x_label.empty())
        svg << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(height - 8.0)
            << "\" text-anchor=\"middle\">" << escape_xml(x_label) << "</text>\n";
    if (!y_label.empty())
        svg << "<text x=\"14\" y=\"" << fmt(mt + ph / 2) << "\" text-anchor=\"middle\" "
            << "transform=\"rotate(-90 14 " << fmt(mt + ph / 2) << ")\">"
            << escape_xml(y_label) << "</text>\n";

    // data lines
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % kPaletteSize];
        svg << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" d=\"";
        bool pen_down = false;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(std::isfinite(s.x[i]) && std::isfinite(s.y[i]))) {
                pen_down = false;
                continue;
            }
            svg << (pen_down ? 'L' : 'M') << fmt(px(s.x[i])) << ' ' << fmt(py(s.y[i]));
            pen_down = true;
        }
        svg << "\"/>\n";
    }

    // legend, top right inside the plot area
    double ly = mt + 14;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = kPalette[si % kPaletteSize];
        const double lx = ml + pw - 150;
        svg << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << fmt(lx + 22) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
            << "\" stroke-width=\"2.5\"/>\n<text x=\"" << fmt(lx + 28) << "\" y=\""
            << fmt(ly) << "\">" << escape_xml(series[si].label) << "</text>\n";
        ly += 16;
    }
    svg << "<rect x=\"" << fmt(ml) << "\" y=\"" << fmt(mt) << "\" width=\"" << fmt(pw)
        << "\" height=\"" << fmt(ph)
        << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n</svg>\n";
    return svg.str();
}

}  // namespace catex
