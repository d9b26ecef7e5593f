#pragma once

#include "intensim/metrics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace intensim {

/// Every metric the library can evaluate by name.
enum class MetricId { ssim_windowed, ssim_global, ms_ssim, g_ssim, itw_gaussian, itw_tanh, itw_sigmoid, lisi };

std::string_view to_string(MetricId id) noexcept;
MetricId parse_metric(std::string_view name);

/// Parses a comma-separated list; "all" expands to default_metrics().
std::vector<MetricId> parse_metric_list(std::string_view text);

/// ssim-windowed, ssim-global, ms-ssim, g-ssim, itw:gaussian, itw:tanh, itw:sigmoid, lisi.
std::vector<MetricId> default_metrics();

/// Parameters shared by all metrics evaluated in one run.
struct MetricConfig {
    SsimConstants ssim;
    LisiConstants lisi;
    WindowSpec window;
    int ms_levels = 5;
    WeightingSpec gaussian = WeightingSpec::gaussian();
    WeightingSpec tanh = WeightingSpec::tanh();
    WeightingSpec sigmoid = WeightingSpec::sigmoid();

    void validate() const;
    nlohmann::json to_json() const;
};

/// Evaluates one metric on a jointly normalized pair.
MetricResult evaluate(MetricId id, const Image& x, const Image& y, const MetricConfig& config);

/// Score an identical pair x, x yields: 1 for the SSIM family, sum/(sum + c2) for LISI.
double identity_score(MetricId id, const Image& x, const MetricConfig& config);

}  // namespace intensim
