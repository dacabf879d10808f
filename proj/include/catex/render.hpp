#pragma once

#include <string>
#include <vector>

namespace catex {

// Minimal self-contained SVG line charts so result CSVs can be eyeballed
// without any external plotting stack. Not a plotting library: linear axes,
// fixed palette, one chart per file.

struct ChartSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;  // same length as x; non-finite points break the line
};

// Renders a complete standalone SVG document. Throws InvalidInput when no
// series carries a finite point or when a series' x/y lengths disagree.
std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const std::string& title, const std::string& x_label,
                              const std::string& y_label, int width = 960,
                              int height = 540);

}  // namespace catex
