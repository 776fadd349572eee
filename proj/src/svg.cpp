#include "hrf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace hrf {

namespace {

constexpr double kWidth = 800.0, kHeight = 600.0;
constexpr double kLeft = 80.0, kRight = 170.0, kTop = 50.0, kBottom = 60.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fnum(double v, const char* spec = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string coord(double v) { return fnum(v, "%.2f"); }

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&')
            out += "&amp;";
        else if (c == '<')
            out += "&lt;";
        else if (c == '>')
            out += "&gt;";
        else
            out += c;
    }
    return out;
}

struct Axis {
    bool log = false;
    double lo = 0.0, hi = 1.0;  // in transformed units (log10 when log)
    double map(double v, double pix_lo, double pix_hi) const {
        double t = log ? std::log10(v) : v;
        return pix_lo + (t - lo) / (hi - lo) * (pix_hi - pix_lo);
    }
};

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

// 1/2/5 ladder tick positions covering [lo, hi] with about `target` ticks.
std::vector<double> linear_ticks(double lo, double hi, int target) {
    double span = hi - lo;
    double raw = span / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    std::vector<double> ticks;
    double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 0.5 * step; t += step) {
        double v = std::abs(t) < 1e-12 * step ? 0.0 : t;
        ticks.push_back(v);
    }
    return ticks;
}

// Integer decade ticks in transformed (log10) units.
std::vector<double> log_ticks(double lo, double hi) {
    std::vector<double> ticks;
    int first = static_cast<int>(std::ceil(lo - 1e-9));
    int last = static_cast<int>(std::floor(hi + 1e-9));
    int count = last - first + 1;
    int stride = count > 8 ? (count + 7) / 8 : 1;
    for (int k = first; k <= last; k += stride) ticks.push_back(k);
    if (ticks.empty()) {
        ticks.push_back(lo);
        ticks.push_back(hi);
    }
    return ticks;
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    double px_lo = kLeft, px_hi = kWidth - kRight;
    double py_lo = kHeight - kBottom, py_hi = kTop;  // y grows upward

    // Collect usable points to size the axes.
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    bool any = false;
    for (const auto& s : spec.series) {
        std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) continue;
            any = true;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
    if (!spec.title.empty())
        out += "<text x=\"" + coord(kWidth / 2) +
               "\" y=\"28\" font-family=\"sans-serif\" font-size=\"17\" "
               "text-anchor=\"middle\">" +
               escape(spec.title) + "</text>\n";

    // Axes frame.
    out += "<rect x=\"" + coord(px_lo) + "\" y=\"" + coord(py_hi) + "\" width=\"" +
           coord(px_hi - px_lo) + "\" height=\"" + coord(py_lo - py_hi) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    if (!any) {
        out += "<text x=\"" + coord((px_lo + px_hi) / 2) + "\" y=\"" +
               coord((py_lo + py_hi) / 2) +
               "\" font-family=\"sans-serif\" font-size=\"16\" fill=\"#888888\" "
               "text-anchor=\"middle\">no data</text>\n";
        out += "</svg>\n";
        return out;
    }

    Axis ax, ay;
    ax.log = spec.log_x;
    ay.log = spec.log_y;
    double txmin = spec.log_x ? std::log10(xmin) : xmin;
    double txmax = spec.log_x ? std::log10(xmax) : xmax;
    double tymin = spec.log_y ? std::log10(ymin) : ymin;
    double tymax = spec.log_y ? std::log10(ymax) : ymax;
    auto pad = [](double& lo, double& hi) {
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            double d = std::max(1.0, std::abs(hi)) * 0.05;
            lo -= d;
            hi += d;
        } else {
            double d = (hi - lo) * 0.05;
            lo -= d;
            hi += d;
        }
    };
    pad(txmin, txmax);
    pad(tymin, tymax);
    ax.lo = txmin;
    ax.hi = txmax;
    ay.lo = tymin;
    ay.hi = tymax;

    // Grid and tick labels.
    std::vector<double> xticks =
        spec.log_x ? log_ticks(ax.lo, ax.hi) : linear_ticks(ax.lo, ax.hi, 6);
    std::vector<double> yticks =
        spec.log_y ? log_ticks(ay.lo, ay.hi) : linear_ticks(ay.lo, ay.hi, 6);
    for (double t : xticks) {
        if (t < ax.lo || t > ax.hi) continue;
        double px = px_lo + (t - ax.lo) / (ax.hi - ax.lo) * (px_hi - px_lo);
        out += "<line x1=\"" + coord(px) + "\" y1=\"" + coord(py_lo) + "\" x2=\"" + coord(px) +
               "\" y2=\"" + coord(py_hi) + "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        double value = spec.log_x ? std::pow(10.0, t) : t;
        out += "<text x=\"" + coord(px) + "\" y=\"" + coord(py_lo + 18) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">" +
               fnum(value) + "</text>\n";
    }
    for (double t : yticks) {
        if (t < ay.lo || t > ay.hi) continue;
        double py = py_lo + (t - ay.lo) / (ay.hi - ay.lo) * (py_hi - py_lo);
        out += "<line x1=\"" + coord(px_lo) + "\" y1=\"" + coord(py) + "\" x2=\"" +
               coord(px_hi) + "\" y2=\"" + coord(py) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        double value = spec.log_y ? std::pow(10.0, t) : t;
        out += "<text x=\"" + coord(px_lo - 6) + "\" y=\"" + coord(py + 4) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" +
               fnum(value) + "</text>\n";
    }

    if (!spec.x_label.empty())
        out += "<text x=\"" + coord((px_lo + px_hi) / 2) + "\" y=\"" + coord(kHeight - 14) +
               "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" +
               escape(spec.x_label) + "</text>\n";
    if (!spec.y_label.empty())
        out += "<text x=\"20\" y=\"" + coord((py_lo + py_hi) / 2) +
               "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
               "transform=\"rotate(-90 20 " +
               coord((py_lo + py_hi) / 2) + ")\">" + escape(spec.y_label) + "</text>\n";

    // Series polylines, markers, legend.
    int color_idx = 0;
    double legend_y = py_hi + 16;
    for (const auto& s : spec.series) {
        const char* color = kPalette[color_idx % kPaletteSize];
        ++color_idx;
        std::vector<std::pair<double, double>> pts;
        std::size_t n = std::min(s.x.size(), s.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!usable(s.x[i], spec.log_x) || !usable(s.y[i], spec.log_y)) continue;
            pts.emplace_back(ax.map(s.x[i], px_lo, px_hi), ay.map(s.y[i], py_lo, py_hi));
        }
        if (!pts.empty()) {
            std::string poly;
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i && spec.staircase)
                    poly += coord(pts[i].first) + "," + coord(pts[i - 1].second) + " ";
                poly += coord(pts[i].first) + "," + coord(pts[i].second);
                if (i + 1 < pts.size()) poly += " ";
            }
            out += "<polyline points=\"" + poly + "\" fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"2\"/>\n";
            for (const auto& [px, py] : pts)
                out += "<circle cx=\"" + coord(px) + "\" cy=\"" + coord(py) +
                       "\" r=\"3\" fill=\"" + color + "\"/>\n";
        }
        if (!s.label.empty()) {
            double lx = px_hi + 12;
            out += "<line x1=\"" + coord(lx) + "\" y1=\"" + coord(legend_y - 4) + "\" x2=\"" +
                   coord(lx + 18) + "\" y2=\"" + coord(legend_y - 4) + "\" stroke=\"" + color +
                   "\" stroke-width=\"2\"/>\n";
            out += "<text x=\"" + coord(lx + 24) + "\" y=\"" + coord(legend_y) +
                   "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(s.label) +
                   "</text>\n";
            legend_y += 18;
        }
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const std::string& path, const PlotSpec& spec) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_svg: cannot open " + path + " for writing");
    std::string body = render_svg(spec);
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw std::runtime_error("write_svg: write to " + path + " failed");
}

}  // namespace hrf
