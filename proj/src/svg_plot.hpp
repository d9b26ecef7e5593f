#pragma once

#include <string>
#include <utility>
#include <vector>

namespace intensim::detail {

struct Series {
    std::string name;
    std::vector<std::pair<double, double>> points;
};

struct Panel {
    std::string title;
    std::vector<Series> series;
};

/// Renders panels stacked vertically, one polyline per series, with a shared
/// legend mapping series names to stroke colours. Output is byte-stable.
std::string render_line_chart(const std::vector<Panel>& panels, const std::string& x_label,
                              const std::string& y_label);

std::string xml_escape(const std::string& text);

}  // namespace intensim::detail
