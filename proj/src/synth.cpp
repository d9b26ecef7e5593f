#include "intensim/synth.hpp"

#include "format.hpp"
#include "intensim/aux_indexes.hpp"
#include "intensim/error.hpp"
#include "intensim/random.hpp"
#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace intensim {

using detail::format_double;

namespace {

std::size_t round_half_up(double v) { return static_cast<std::size_t>(std::floor(v + 0.5)); }

// Picks k of the given indices uniformly at random; result is sorted ascending.
std::vector<std::size_t> choose(std::vector<std::size_t> pool, std::size_t k, Rng& rng) {
    k = std::min(k, pool.size());
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    std::sort(pool.begin(), pool.end());
    return pool;
}

double draw(NoiseDistribution d, Rng& rng) {
    switch (d) {
        case NoiseDistribution::uniform: return rng.symmetric();
        case NoiseDistribution::gaussian: return rng.standard_normal();
        case NoiseDistribution::rayleigh: return rng.standard_rayleigh();
    }
    return 0.0;
}

std::string band_group(Band band) { return std::string(to_string(band)); }

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

Histogram histogram_of(const std::vector<double>& v, std::size_t bins) {
    Histogram h;
    if (v.empty() || bins == 0) return h;
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double x : v) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

}  // namespace

std::string_view to_string(NoiseDistribution d) noexcept {
    switch (d) {
        case NoiseDistribution::uniform: return "uniform";
        case NoiseDistribution::gaussian: return "gaussian";
        case NoiseDistribution::rayleigh: return "rayleigh";
    }
    return "unknown";
}

NoiseDistribution parse_distribution(std::string_view text) {
    if (text == "uniform") return NoiseDistribution::uniform;
    if (text == "gaussian") return NoiseDistribution::gaussian;
    if (text == "rayleigh") return NoiseDistribution::rayleigh;
    throw InvalidArgument("unknown noise distribution '" + std::string(text) + "'");
}

void NoiseSpec::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw InvalidArgument("noise amplitude must be non-negative");
    if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("noise band fraction must lie in (0, 1)");
    if (!(coverage > 0.0 && coverage <= 1.0)) throw InvalidArgument("noise coverage must lie in (0, 1]");
}

Image inject_noise(const Image& x, const NoiseSpec& spec) {
    spec.validate();
    require_unit_range(x, "inject_noise");
    const IntensityMask mask = intensity_mask(x, spec.band, spec.fraction);
    Rng rng(spec.seed);
    std::vector<std::size_t> targets = mask.indices();
    if (spec.coverage < 1.0) targets = choose(std::move(targets), round_half_up(spec.coverage * targets.size()), rng);

    std::vector<double> out(x.pixels().begin(), x.pixels().end());
    for (std::size_t i : targets) {
        const double noise = spec.amplitude * draw(spec.distribution, rng);
        out[i] = std::clamp(out[i] + noise, 0.0, 1.0);
    }
    return Image(x.width(), x.height(), std::move(out));
}

std::vector<CurvePair> generate_curve_pairs(const Image& base, const std::vector<double>& levels, Band band,
                                            std::uint64_t seed, double fraction) {
    require_unit_range(base, "generate_curve_pairs");
    if (levels.empty()) throw InvalidArgument("similarity levels must not be empty");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > 0.0 && levels[i] <= 1.0)) throw InvalidArgument("similarity levels must lie in (0, 1]");
        if (i && !(levels[i] > levels[i - 1])) throw InvalidArgument("similarity levels must be strictly increasing");
    }
    const IntensityMask mask = intensity_mask(base, band, fraction);
    const std::vector<std::size_t> pool = mask.indices();

    std::vector<CurvePair> pairs;
    pairs.reserve(levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
        Rng rng(derive_seed(seed, li));
        const std::size_t replaced = round_half_up((1.0 - levels[li]) * static_cast<double>(pool.size()));
        std::vector<double> out(base.pixels().begin(), base.pixels().end());
        for (std::size_t i : choose(pool, replaced, rng)) out[i] = rng.uniform();
        pairs.push_back({base, Image(base.width(), base.height(), std::move(out)), levels[li]});
    }
    return pairs;
}

std::vector<CurvePoint> run_characteristic_curves(const Image& base, const std::vector<MetricId>& metrics,
                                                  const std::vector<double>& levels, std::uint64_t seed,
                                                  const MetricConfig& config, double fraction) {
    if (metrics.empty()) throw InvalidArgument("at least one metric is required");
    config.validate();
    std::vector<CurvePoint> points;
    for (Band band : {Band::highest, Band::lowest}) {
        const std::uint64_t band_seed = derive_seed(seed, band == Band::highest ? 0 : 1);
        for (const CurvePair& pair : generate_curve_pairs(base, levels, band, band_seed, fraction)) {
            const auto [x, y] = normalize_joint(pair.reference, pair.perturbed);
            CurvePoint point{pair.level, band, {}};
            for (MetricId id : metrics) point.scores[std::string(to_string(id))] = evaluate(id, x, y, config).score;
            points.push_back(std::move(point));
        }
    }
    return points;
}

std::string curves_to_csv(const std::vector<CurvePoint>& points) {
    std::string out = "level,band,metric,score\n";
    for (const auto& p : points) {
        for (const auto& [metric, score] : p.scores) {
            out += format_double(p.level) + "," + std::string(to_string(p.band)) + "," + metric + "," +
                   format_double(score) + "\n";
        }
    }
    return out;
}

std::string curves_to_svg(const std::vector<CurvePoint>& points) {
    std::vector<detail::Panel> panels;
    std::map<std::string, std::size_t> panel_of;
    for (const auto& p : points) {
        for (const auto& [metric, score] : p.scores) {
            auto [it, added] = panel_of.emplace(metric, panels.size());
            if (added) panels.push_back({metric, {}});
            auto& series = panels[it->second].series;
            const std::string name = "for " + std::string(p.band == Band::highest ? "high" : "low");
            auto s = std::find_if(series.begin(), series.end(), [&](const auto& e) { return e.name == name; });
            if (s == series.end()) {
                series.push_back({name, {}});
                s = series.end() - 1;
            }
            s->points.emplace_back(p.level, score);
        }
    }
    return detail::render_line_chart(panels, "similarity level", "score");
}

const SensiSummary* NoiseGroupReport::find(std::string_view group, std::string_view metric) const {
    for (const auto& s : summaries) {
        if (s.group == group && s.metric == metric) return &s;
    }
    return nullptr;
}

NoiseGroupReport run_noise_groups(const std::vector<Image>& refs, const std::vector<NoiseSpec>& specs,
                                  const std::vector<MetricId>& metrics, std::size_t repeats, std::uint64_t seed,
                                  const NoiseGroupOptions& options) {
    if (repeats < 1) throw InvalidArgument("repeats must be at least 1");
    if (refs.empty()) throw InvalidArgument("at least one reference image is required");
    if (specs.empty()) throw InvalidArgument("at least one noise spec is required");
    if (metrics.empty()) throw InvalidArgument("at least one metric is required");
    options.config.validate();
    for (const auto& s : specs) s.validate();

    std::vector<MetricId> order;
    order.push_back(options.baseline);
    for (MetricId id : metrics) {
        if (id != options.baseline) order.push_back(id);
    }

    NoiseGroupReport report;
    report.baseline = std::string(to_string(options.baseline));
    report.seed = seed;

    for (std::size_t ri = 0; ri < refs.size(); ++ri) {
        for (std::size_t si = 0; si < specs.size(); ++si) {
            for (std::size_t k = 0; k < repeats; ++k) {
                NoiseSpec spec = specs[si];
                spec.seed = derive_seed(derive_seed(derive_seed(seed, ri), si), k);
                const Image noisy = inject_noise(refs[ri], spec);

                std::vector<double> scores;
                bool identical = refs[ri] == noisy;
                if (identical) {
                    for (MetricId id : order) scores.push_back(identity_score(id, refs[ri], options.config));
                } else {
                    const auto [x, y] = normalize_joint(refs[ri], noisy);
                    for (MetricId id : order) scores.push_back(evaluate(id, x, y, options.config).score);
                }
                const double baseline = scores.front();
                for (std::size_t m = 0; m < order.size(); ++m) {
                    NoiseRow row{band_group(spec.band), ri, si, k, spec.distribution, spec.amplitude, spec.band,
                                 std::string(to_string(order[m])), scores[m], std::nullopt};
                    try {
                        row.sensi = sensi(baseline, scores[m]);
                    } catch (const UndefinedSensitivity&) {
                        row.sensi.reset();
                    }
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }

    // Summaries in first-appearance order of group, then metric order.
    std::vector<std::string> groups;
    for (const auto& row : report.rows) {
        if (std::find(groups.begin(), groups.end(), row.group) == groups.end()) groups.push_back(row.group);
    }
    for (const auto& group : groups) {
        for (MetricId id : order) {
            const std::string name(to_string(id));
            SensiSummary summary{group, name, 0, 0, 0.0, 0.0, {}};
            std::vector<double> values;
            for (const auto& row : report.rows) {
                if (row.group != group || row.metric != name) continue;
                if (row.sensi) {
                    values.push_back(*row.sensi);
                } else {
                    ++summary.undefined;
                }
            }
            summary.count = values.size();
            summary.mean = mean_of(values);
            summary.sd = sd_of(values, summary.mean);
            summary.histogram = histogram_of(values, options.bins);
            report.summaries.push_back(std::move(summary));
        }
    }
    return report;
}

std::string noise_rows_to_csv(const NoiseGroupReport& report) {
    std::string out = "group,ref,repeat,distribution,amplitude,band,metric,score,sensi\n";
    for (const auto& r : report.rows) {
        out += r.group + "," + std::to_string(r.ref_index) + "," + std::to_string(r.repeat) + "," +
               std::string(to_string(r.distribution)) + "," + format_double(r.amplitude) + "," +
               std::string(to_string(r.band)) + "," + r.metric + "," + format_double(r.score) + "," +
               (r.sensi ? format_double(*r.sensi) : std::string()) + "\n";
    }
    return out;
}

nlohmann::json noise_histograms_to_json(const NoiseGroupReport& report) {
    nlohmann::json groups = nlohmann::json::object();
    for (const auto& s : report.summaries) {
        groups[s.group][s.metric] = {{"count", s.count},
                                     {"undefined", s.undefined},
                                     {"mean", s.mean},
                                     {"sd", s.sd},
                                     {"bin_edges", s.histogram.edges},
                                     {"counts", s.histogram.counts}};
    }
    return {{"baseline", report.baseline}, {"seed", report.seed}, {"rng", kRngAlgorithm}, {"groups", groups}};
}

std::string noise_summary_table(const NoiseGroupReport& report) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-14s %8s %12s %12s\n", "group", "metric", "n", "mean sensi", "SD");
    out << line;
    for (const auto& s : report.summaries) {
        std::snprintf(line, sizeof line, "%-10s %-14s %8zu %12.4f %12.4f\n", s.group.c_str(), s.metric.c_str(),
                      s.count, s.mean, s.sd);
        out << line;
    }
    return out.str();
}

namespace {

// Separable Gaussian blur with truncated, renormalized taps (radius 3 sigma).
std::vector<double> blur(const std::vector<double>& in, std::size_t width, std::size_t height, double sigma) {
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
    }
    const auto w = static_cast<std::ptrdiff_t>(width);
    const auto h = static_cast<std::ptrdiff_t>(height);
    auto pass = [&](const std::vector<double>& src, bool horizontal) {
        std::vector<double> dst(src.size());
        for (std::ptrdiff_t r = 0; r < h; ++r) {
            for (std::ptrdiff_t c = 0; c < w; ++c) {
                double acc = 0.0;
                double norm = 0.0;
                for (std::ptrdiff_t k = -radius; k <= radius; ++k) {
                    const std::ptrdiff_t rr = horizontal ? r : r + k;
                    const std::ptrdiff_t cc = horizontal ? c + k : c;
                    if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
                    const double kw = kernel[static_cast<std::size_t>(k + radius)];
                    acc += kw * src[static_cast<std::size_t>(rr * w + cc)];
                    norm += kw;
                }
                dst[static_cast<std::size_t>(r * w + c)] = acc / norm;
            }
        }
        return dst;
    };
    return pass(pass(in, true), false);
}

Image min_max_image(std::size_t width, std::size_t height, std::vector<double> px) {
    const double lo = *std::min_element(px.begin(), px.end());
    const double hi = *std::max_element(px.begin(), px.end());
    if (!(hi > lo)) throw DegenerateInput("degenerate input: generated reference is constant");
    for (double& v : px) v = (v - lo) / (hi - lo);
    return Image(width, height, std::move(px));
}

}  // namespace

Image synthetic_natural(std::size_t width, std::size_t height, std::uint64_t seed) {
    if (width * height < 2) throw InvalidArgument("synthetic reference needs at least two pixels");
    Rng rng(seed);
    const std::size_t n = width * height;
    std::vector<double> fine(n), coarse(n);
    for (double& v : fine) v = rng.uniform();
    for (double& v : coarse) v = rng.uniform();
    const double scale = static_cast<double>(std::min(width, height));
    fine = blur(fine, width, height, 1.5);
    coarse = blur(coarse, width, height, std::max(1.0, scale / 12.0));
    // Blurred noise has a small spread; rescale each layer before mixing.
    auto stretch = [](std::vector<double>& v) {
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        if (hi > lo) {
            for (double& x : v) x = (x - lo) / (hi - lo);
        }
    };
    stretch(fine);
    stretch(coarse);
    std::vector<double> px(n);
    for (std::size_t i = 0; i < n; ++i) px[i] = 0.35 * fine[i] + 0.65 * coarse[i];
    return min_max_image(width, height, std::move(px));
}

Image synthetic_reference(std::size_t width, std::size_t height, std::uint64_t seed) {
    if (width * height < 2) throw InvalidArgument("synthetic reference needs at least two pixels");
    Rng rng(seed);
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    const double scale = std::min(w, h);

    struct Source {
        double cx, cy, sigma, peak;
    };
    std::vector<Source> sources(6);
    for (auto& s : sources) {
        s.cx = rng.uniform() * w;
        s.cy = rng.uniform() * h;
        s.sigma = scale * (0.03 + 0.07 * rng.uniform());
        s.peak = 0.3 + 0.7 * rng.uniform();
    }
    const double gx = rng.symmetric();
    const double gy = rng.symmetric();

    std::vector<double> px(width * height);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) {
            const double u = static_cast<double>(c) / w;
            const double v = static_cast<double>(r) / h;
            double value = 0.06 + 0.03 * (gx * u + gy * v) + 0.02 * rng.uniform();
            for (const auto& s : sources) {
                const double dx = static_cast<double>(c) - s.cx;
                const double dy = static_cast<double>(r) - s.cy;
                value += s.peak * std::exp(-(dx * dx + dy * dy) / (2.0 * s.sigma * s.sigma));
            }
            px[r * width + c] = value;
        }
    }
    return min_max_image(width, height, std::move(px));
}

}  // namespace intensim
