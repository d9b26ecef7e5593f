#include "intensim/sequence.hpp"

#include "format.hpp"
#include "intensim/aux_indexes.hpp"
#include "intensim/error.hpp"
#include "svg_plot.hpp"

#include <algorithm>
#include <charconv>

namespace intensim {

using detail::format_double;

std::string_view to_string(CompareMode mode) noexcept {
    return mode == CompareMode::adjacent ? "adjacent" : "first-vs-each";
}

CompareMode parse_compare_mode(std::string_view text) {
    if (text == "adjacent") return CompareMode::adjacent;
    if (text == "first-vs-each" || text == "first") return CompareMode::first_vs_each;
    throw InvalidArgument("unknown comparison mode '" + std::string(text) + "'");
}

void RegionGrid::validate() const {
    if (rows == 0 || cols == 0) throw InvalidArgument("grid must have at least one row and one column");
    if (!labels.empty() && labels.size() != rows * cols) {
        throw InvalidArgument("grid needs " + std::to_string(rows * cols) + " labels, got " +
                              std::to_string(labels.size()));
    }
}

std::string RegionGrid::label(std::size_t row, std::size_t col) const {
    if (!labels.empty()) return labels.at(row * cols + col);
    std::string name;
    // Spreadsheet-style row letters: A..Z, AA, AB, ...
    std::size_t r = row + 1;
    while (r > 0) {
        name.insert(name.begin(), static_cast<char>('A' + (r - 1) % 26));
        r = (r - 1) / 26;
    }
    return name + std::to_string(col + 1);
}

Rect RegionGrid::cell(std::size_t row, std::size_t col, std::size_t width, std::size_t height) const {
    const std::size_t cw = width / cols;
    const std::size_t ch = height / rows;
    Rect rect{col * cw, row * ch, cw, ch};
    if (col + 1 == cols) rect.width = width - col * cw;
    if (row + 1 == rows) rect.height = height - row * ch;
    return rect;
}

RegionGrid parse_grid(std::string_view text) {
    const auto x = text.find_first_of("xX");
    auto parse = [&](std::string_view part) {
        std::size_t v = 0;
        const auto res = std::from_chars(part.data(), part.data() + part.size(), v);
        if (res.ec != std::errc{} || res.ptr != part.data() + part.size() || v == 0) {
            throw InvalidArgument("invalid grid '" + std::string(text) + "', expected RxC");
        }
        return v;
    };
    if (x == std::string_view::npos) throw InvalidArgument("invalid grid '" + std::string(text) + "', expected RxC");
    RegionGrid grid{parse(text.substr(0, x)), parse(text.substr(x + 1)), {}};
    grid.validate();
    return grid;
}

const RegionSeries* SequenceReport::find(std::string_view region) const {
    for (const auto& r : regions) {
        if (r.region == region) return &r;
    }
    return nullptr;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> pairs_for(std::size_t n, CompareMode mode) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t t = 1; t < n; ++t) out.emplace_back(mode == CompareMode::adjacent ? t - 1 : 0, t);
    return out;
}

void check_frames(const std::vector<Image>& frames) {
    if (frames.size() < 2) throw InvalidArgument("a sequence needs at least two frames");
    for (const auto& f : frames) require_same_shape(frames.front(), f);
}

std::vector<Image> normalize_sequence(const std::vector<Image>& frames) {
    double lo = frames.front().min();
    double hi = frames.front().max();
    for (const auto& f : frames) {
        lo = std::min(lo, f.min());
        hi = std::max(hi, f.max());
    }
    if (!(hi > lo)) throw DegenerateInput("degenerate input: sequence intensity range is zero");
    std::vector<Image> out;
    for (const auto& f : frames) {
        std::vector<double> px(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) px[i] = std::clamp((f[i] - lo) / (hi - lo), 0.0, 1.0);
        out.emplace_back(f.width(), f.height(), std::move(px));
    }
    return out;
}

RegionSeries run_series(const std::vector<Image>& frames, const std::vector<MetricId>& metrics, CompareMode mode,
                        const SequenceOptions& options, std::string region) {
    std::optional<std::vector<Image>> scaled;
    if (options.sequence_normalization) scaled = normalize_sequence(frames);

    RegionSeries series{std::move(region), {}};
    std::vector<double> running(metrics.size(), 0.0);
    std::size_t index = 0;
    for (const auto& [a, b] : pairs_for(frames.size(), mode)) {
        SequenceStep step;
        step.index = ++index;
        step.from = a;
        step.to = b;
        const Image& fa = frames[a];
        const Image& fb = frames[b];

        std::optional<std::pair<Image, Image>> pair;
        if (scaled) {
            pair.emplace((*scaled)[a], (*scaled)[b]);
        } else if (fa == fb && fa.min() == fa.max()) {
            step.degenerate = true;
        } else {
            pair = normalize_joint(fa, fb);
        }

        step.direc = (options.direc_on_normalized && pair) ? direc(pair->first, pair->second) : direc(fa, fb);
        for (std::size_t m = 0; m < metrics.size(); ++m) {
            double sim;
            if (pair) {
                sim = evaluate(metrics[m], pair->first, pair->second, options.config).score;
            } else {
                // A repeated constant frame: structural indexes see no change, LISI sees no information.
                sim = metrics[m] == MetricId::lisi ? 0.0 : 1.0;
            }
            const double signed_step = static_cast<double>(step.direc) * (1.0 - sim);
            running[m] += signed_step;
            step.similarity.push_back(sim);
            step.signed_step.push_back(signed_step);
            step.cumulative.push_back(running[m]);
        }
        series.steps.push_back(std::move(step));
    }
    return series;
}

nlohmann::json base_metadata(const std::vector<Image>& frames, const std::vector<MetricId>& metrics,
                             CompareMode mode, const SequenceOptions& options) {
    std::vector<std::string> names;
    for (MetricId id : metrics) names.emplace_back(to_string(id));
    return {{"format_version", 1},
            {"frames", frames.size()},
            {"width", frames.front().width()},
            {"height", frames.front().height()},
            {"mode", to_string(mode)},
            {"metrics", names},
            {"normalization", options.sequence_normalization ? "sequence" : "pair"},
            {"direc_input", options.direc_on_normalized ? "normalized" : "raw"},
            {"signed_step", "direc * (1 - similarity)"},
            {"config", options.config.to_json()}};
}

}  // namespace

SequenceReport compare_sequence(const std::vector<Image>& frames, const std::vector<MetricId>& metrics,
                                CompareMode mode, const SequenceOptions& options) {
    check_frames(frames);
    if (metrics.empty()) throw InvalidArgument("at least one metric is required");
    options.config.validate();
    SequenceReport report;
    for (MetricId id : metrics) report.metrics.emplace_back(to_string(id));
    report.regions.push_back(run_series(frames, metrics, mode, options, "full"));
    report.metadata = base_metadata(frames, metrics, mode, options);
    return report;
}

SequenceReport compare_sequence_regions(const std::vector<Image>& frames, const RegionGrid& grid,
                                        const std::vector<MetricId>& metrics, CompareMode mode,
                                        const SequenceOptions& options) {
    check_frames(frames);
    grid.validate();
    if (metrics.empty()) throw InvalidArgument("at least one metric is required");
    options.config.validate();
    const std::size_t width = frames.front().width();
    const std::size_t height = frames.front().height();
    if (grid.rows > height || grid.cols > width) throw InvalidArgument("grid has more cells than pixels along an axis");

    SequenceReport report;
    for (MetricId id : metrics) report.metrics.emplace_back(to_string(id));
    for (std::size_t r = 0; r < grid.rows; ++r) {
        for (std::size_t c = 0; c < grid.cols; ++c) {
            const Rect rect = grid.cell(r, c, width, height);
            std::vector<Image> cells;
            cells.reserve(frames.size());
            for (const auto& f : frames) cells.push_back(crop(f, rect));
            report.regions.push_back(run_series(cells, metrics, mode, options, grid.label(r, c)));
        }
    }
    report.metadata = base_metadata(frames, metrics, mode, options);
    report.metadata["grid"] = {{"rows", grid.rows}, {"cols", grid.cols}};
    return report;
}

std::string_view to_string(ReportFormat format) noexcept {
    switch (format) {
        case ReportFormat::csv: return "csv";
        case ReportFormat::json: return "json";
        case ReportFormat::svg: return "svg";
    }
    return "unknown";
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::csv;
    if (text == "json") return ReportFormat::json;
    if (text == "svg") return ReportFormat::svg;
    throw InvalidArgument("unknown report format '" + std::string(text) + "'");
}

std::string emit_report(const SequenceReport& report, ReportFormat format) {
    if (report.regions.empty() || report.metrics.empty()) throw InvalidArgument("report is empty");
    for (const auto& r : report.regions) {
        if (r.steps.empty()) throw InvalidArgument("region '" + r.region + "' has no steps");
    }

    switch (format) {
        case ReportFormat::csv: {
            std::string out = "region,step_index,metric,similarity,direc,signed_step,cumulative\n";
            for (const auto& r : report.regions) {
                for (const auto& s : r.steps) {
                    for (std::size_t m = 0; m < report.metrics.size(); ++m) {
                        out += r.region + "," + std::to_string(s.index) + "," + report.metrics[m] + "," +
                               format_double(s.similarity[m]) + "," + std::to_string(s.direc) + "," +
                               format_double(s.signed_step[m]) + "," + format_double(s.cumulative[m]) + "\n";
                    }
                }
            }
            return out;
        }
        case ReportFormat::json: {
            nlohmann::json regions = nlohmann::json::array();
            for (const auto& r : report.regions) {
                nlohmann::json steps = nlohmann::json::array();
                for (const auto& s : r.steps) {
                    nlohmann::json sim, step, cum;
                    for (std::size_t m = 0; m < report.metrics.size(); ++m) {
                        sim[report.metrics[m]] = s.similarity[m];
                        step[report.metrics[m]] = s.signed_step[m];
                        cum[report.metrics[m]] = s.cumulative[m];
                    }
                    nlohmann::json js = {{"step_index", s.index}, {"from", s.from},          {"to", s.to},
                                         {"direc", s.direc},      {"similarity", sim},       {"signed_step", step},
                                         {"cumulative", cum}};
                    if (s.degenerate) js["degenerate"] = true;
                    steps.push_back(std::move(js));
                }
                regions.push_back({{"region", r.region}, {"steps", steps}});
            }
            nlohmann::json doc = {{"metadata", report.metadata}, {"metrics", report.metrics}, {"regions", regions}};
            return doc.dump(2) + "\n";
        }
        case ReportFormat::svg: {
            std::vector<detail::Panel> panels;
            for (const auto& r : report.regions) {
                detail::Panel panel{"region " + r.region, {}};
                for (std::size_t m = 0; m < report.metrics.size(); ++m) {
                    detail::Series s{report.metrics[m], {{0.0, 0.0}}};
                    for (const auto& st : r.steps) s.points.emplace_back(static_cast<double>(st.index), st.cumulative[m]);
                    panel.series.push_back(std::move(s));
                }
                panels.push_back(std::move(panel));
            }
            return detail::render_line_chart(panels, "step", "cumulative difference");
        }
    }
    throw InvalidArgument("unknown report format");
}

}  // namespace intensim
