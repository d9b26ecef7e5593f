#include "intensim/registry.hpp"

#include "intensim/error.hpp"

#include <algorithm>

namespace intensim {

namespace {

constexpr MetricId kAll[] = {MetricId::ssim_windowed, MetricId::ssim_global, MetricId::ms_ssim,
                             MetricId::g_ssim,        MetricId::itw_gaussian, MetricId::itw_tanh,
                             MetricId::itw_sigmoid,   MetricId::lisi};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view to_string(MetricId id) noexcept {
    switch (id) {
        case MetricId::ssim_windowed: return "ssim-windowed";
        case MetricId::ssim_global: return "ssim-global";
        case MetricId::ms_ssim: return "ms-ssim";
        case MetricId::g_ssim: return "g-ssim";
        case MetricId::itw_gaussian: return "itw:gaussian";
        case MetricId::itw_tanh: return "itw:tanh";
        case MetricId::itw_sigmoid: return "itw:sigmoid";
        case MetricId::lisi: return "lisi";
    }
    return "unknown";
}

MetricId parse_metric(std::string_view name) {
    name = trim(name);
    for (MetricId id : kAll) {
        if (to_string(id) == name) return id;
    }
    if (name == "ssim") return MetricId::ssim_windowed;
    throw InvalidArgument("unknown metric '" + std::string(name) + "'");
}

std::vector<MetricId> parse_metric_list(std::string_view text) {
    if (trim(text) == "all") return default_metrics();
    std::vector<MetricId> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (!item.empty()) {
            const MetricId id = parse_metric(item);
            if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
        }
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw InvalidArgument("metric list is empty");
    return out;
}

std::vector<MetricId> default_metrics() { return {std::begin(kAll), std::end(kAll)}; }

void MetricConfig::validate() const {
    if (!(ssim.c1 > 0.0) || !(ssim.c2 > 0.0)) throw InvalidArgument("SSIM constants must be positive");
    if (!(lisi.c1 > 0.0) || !(lisi.c2 > 0.0)) throw InvalidArgument("LISI constants must be positive");
    if (window.size < 1 || window.size % 2 == 0) throw InvalidArgument("window size must be a positive odd integer");
    if (!(window.sigma > 0.0)) throw InvalidArgument("window sigma must be positive");
    if (ms_levels < 1 || ms_levels > 5) throw InvalidArgument("ms-ssim levels must be between 1 and 5");
    if (gaussian.kind != WeightingKind::gaussian || tanh.kind != WeightingKind::tanh ||
        sigmoid.kind != WeightingKind::sigmoid) {
        throw InvalidArgument("weighting specs are assigned to the wrong kind");
    }
    gaussian.validate();
    tanh.validate();
    sigmoid.validate();
}

nlohmann::json MetricConfig::to_json() const {
    return {{"ssim_c1", ssim.c1},
            {"ssim_c2", ssim.c2},
            {"lisi_c1", lisi.c1},
            {"lisi_c2", lisi.c2},
            {"window", window.size},
            {"window_sigma", window.sigma},
            {"ms_levels", ms_levels},
            {"gaussian_sigma", gaussian.sigma},
            {"tanh_slope", tanh.slope},
            {"sigmoid_slope", sigmoid.slope},
            {"sigmoid_center", sigmoid.center}};
}

MetricResult evaluate(MetricId id, const Image& x, const Image& y, const MetricConfig& config) {
    switch (id) {
        case MetricId::ssim_windowed: return ssim_windowed(x, y, config.ssim, config.window);
        case MetricId::ssim_global: return ssim_global(x, y, config.ssim);
        case MetricId::ms_ssim: return ms_ssim(x, y, config.ssim, config.ms_levels, config.window);
        case MetricId::g_ssim: return g_ssim(x, y, config.ssim, config.window);
        case MetricId::itw_gaussian: return itw_ssim(x, y, config.gaussian, config.ssim);
        case MetricId::itw_tanh: return itw_ssim(x, y, config.tanh, config.ssim);
        case MetricId::itw_sigmoid: return itw_ssim(x, y, config.sigmoid, config.ssim);
        case MetricId::lisi: return lisi(x, y, config.lisi);
    }
    throw InvalidArgument("unknown metric");
}

double identity_score(MetricId id, const Image& x, const MetricConfig& config) {
    if (id != MetricId::lisi) return 1.0;
    const double s = x.sum();
    return s / (s + config.lisi.c2);
}

}  // namespace intensim
