#include "svg_plot.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <map>

namespace intensim::detail {

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

constexpr double kWidth = 640.0;
constexpr double kPanelHeight = 240.0;
constexpr double kMarginLeft = 64.0;
constexpr double kMarginRight = 16.0;
constexpr double kMarginTop = 28.0;
constexpr double kMarginBottom = 36.0;
constexpr double kLegendRow = 16.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

}  // namespace

std::string xml_escape(const std::string& text) {
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

std::string render_line_chart(const std::vector<Panel>& panels, const std::string& x_label,
                              const std::string& y_label) {
    // Colour assignment follows first appearance across all panels.
    std::map<std::string, std::size_t> colour_of;
    std::vector<std::string> legend;
    for (const auto& panel : panels) {
        for (const auto& s : panel.series) {
            if (colour_of.emplace(s.name, legend.size()).second) legend.push_back(s.name);
        }
    }

    const double legend_height = kLegendRow * static_cast<double>(legend.size()) + 8.0;
    const double height = kPanelHeight * static_cast<double>(panels.size()) + legend_height;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double top = kPanelHeight * static_cast<double>(p);
        const double x0 = kMarginLeft;
        const double x1 = kWidth - kMarginRight;
        const double y0 = top + kPanelHeight - kMarginBottom;
        const double y1 = top + kMarginTop;

        double xmin = std::numeric_limits<double>::infinity();
        double xmax = -xmin;
        double ymin = xmin;
        double ymax = -xmin;
        for (const auto& s : panel.series) {
            for (const auto& [x, y] : s.points) {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
        if (!(xmin <= xmax)) {
            xmin = 0.0;
            xmax = 1.0;
            ymin = 0.0;
            ymax = 1.0;
        }
        if (xmax == xmin) {
            xmin -= 0.5;
            xmax += 0.5;
        }
        if (ymax == ymin) {
            ymin -= 0.5;
            ymax += 0.5;
        }
        auto sx = [&](double x) { return x0 + (x - xmin) / (xmax - xmin) * (x1 - x0); };
        auto sy = [&](double y) { return y0 - (y - ymin) / (ymax - ymin) * (y0 - y1); };

        out += "<g class=\"panel\">\n";
        out += "<text x=\"" + num(x0) + "\" y=\"" + num(top + 18.0) + "\" font-size=\"13\" font-family=\"sans-serif\">" +
               xml_escape(panel.title) + "</text>\n";
        out += "<rect x=\"" + num(x0) + "\" y=\"" + num(y1) + "\" width=\"" + num(x1 - x0) + "\" height=\"" +
               num(y0 - y1) + "\" fill=\"none\" stroke=\"#444\"/>\n";
        if (ymin < 0.0 && ymax > 0.0) {
            out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(sy(0.0)) + "\" x2=\"" + num(x1) + "\" y2=\"" +
                   num(sy(0.0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
        }
        const auto text_at = [&](double x, double y, const std::string& anchor, const std::string& body) {
            out += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"10\" font-family=\"sans-serif\" "
                   "text-anchor=\"" + anchor + "\">" + xml_escape(body) + "</text>\n";
        };
        text_at(x0 - 4.0, y0, "end", tick(ymin));
        text_at(x0 - 4.0, y1 + 8.0, "end", tick(ymax));
        text_at(x0, y0 + 14.0, "start", tick(xmin));
        text_at(x1, y0 + 14.0, "end", tick(xmax));
        text_at((x0 + x1) / 2.0, y0 + 28.0, "middle", x_label);
        text_at(x0 - 4.0, (y0 + y1) / 2.0, "end", y_label);

        for (const auto& s : panel.series) {
            const char* colour = kPalette[colour_of.at(s.name) % kPalette.size()];
            out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                if (i) out += ' ';
                out += num(sx(s.points[i].first)) + "," + num(sy(s.points[i].second));
            }
            out += "\"><title>" + xml_escape(s.name) + "</title></polyline>\n";
        }
        out += "</g>\n";
    }

    out += "<g class=\"legend\">\n";
    const double legend_top = kPanelHeight * static_cast<double>(panels.size());
    for (std::size_t i = 0; i < legend.size(); ++i) {
        const double y = legend_top + kLegendRow * static_cast<double>(i) + 10.0;
        const char* colour = kPalette[i % kPalette.size()];
        out += "<line x1=\"" + num(kMarginLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kMarginLeft + 24.0) +
               "\" y2=\"" + num(y) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + num(kMarginLeft + 30.0) + "\" y=\"" + num(y + 4.0) +
               "\" font-size=\"11\" font-family=\"sans-serif\">" + xml_escape(legend[i]) + "</text>\n";
    }
    out += "</g>\n</svg>\n";
    return out;
}

}  // namespace intensim::detail
