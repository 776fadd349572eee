#pragma once

#include <string>
#include <vector>

namespace hrf {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    bool staircase = false;  // step-after rendering between points
    std::vector<PlotSeries> series;
};

// Deterministic, self-contained SVG on a fixed 800x600 canvas. Non-finite
// points (and non-positive ones on log axes) are dropped; an empty plot
// renders the axes frame with a "no data" annotation.
std::string render_svg(const PlotSpec& spec);

void write_svg(const std::string& path, const PlotSpec& spec);

}  // namespace hrf
