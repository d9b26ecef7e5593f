#pragma once

#include "intensim/image.hpp"

#include <json.hpp>

#include <functional>
#include <string>
#include <vector>

namespace intensim {

/// Stabilizing constants of the SSIM family.
struct SsimConstants {
    double c1 = 1e-4;
    double c2 = 9e-4;
};

/// Stabilizing constants of LISI. The prefactor is always c1 / 2.
struct LisiConstants {
    double c1 = 1e-4;
    double c2 = 1e-4;

    double d() const noexcept { return c1 / 2.0; }
};

/// Gaussian sliding window used by the local SSIM variants. Near the borders
/// the window is truncated and its weights renormalized.
struct WindowSpec {
    int size = 11;
    double sigma = 1.5;
};

enum class WeightingKind { gaussian, tanh, sigmoid };

/// Intensity weighting function g(z) used by ITW-SSIM.
///
///   gaussian: exp(-(z - 1)^2 / (2 sigma^2))
///   tanh:     tanh(slope * z)
///   sigmoid:  1 / (1 + exp(-slope * (z - center)))
struct WeightingSpec {
    WeightingKind kind = WeightingKind::gaussian;
    double sigma = 0.5;
    double slope = 2.0;
    double center = 0.5;

    static WeightingSpec gaussian(double sigma = 0.5) { return {WeightingKind::gaussian, sigma, 2.0, 0.5}; }
    static WeightingSpec tanh(double slope = 2.0) { return {WeightingKind::tanh, 0.5, slope, 0.5}; }
    static WeightingSpec sigmoid(double slope = 10.0, double center = 0.5) {
        return {WeightingKind::sigmoid, 0.5, slope, center};
    }

    /// Throws InvalidArgument when the parameters do not give an increasing g.
    void validate() const;
    std::string describe() const;
};

std::string_view to_string(WeightingKind kind) noexcept;
WeightingKind parse_weighting_kind(std::string_view text);

/// Score of one metric together with the parameters that produced it.
struct MetricResult {
    std::string metric;
    double score = 0.0;
    nlohmann::json config;
};

void to_json(nlohmann::json& j, const MetricResult& r);

/// SSIM computed once over the whole image, sample (N - 1) statistics.
MetricResult ssim_global(const Image& x, const Image& y, const SsimConstants& c = {});

/// Mean of the local SSIM map over a Gaussian sliding window.
MetricResult ssim_windowed(const Image& x, const Image& y, const SsimConstants& c = {},
                           const WindowSpec& window = {});

/// Multi-scale SSIM. Exponents are the standard five-scale set truncated to
/// `levels` and renormalized to sum to one.
MetricResult ms_ssim(const Image& x, const Image& y, const SsimConstants& c = {}, int levels = 5,
                     const WindowSpec& window = {});

/// Gradient-based SSIM: luminance from the intensities, contrast and
/// structure from Sobel gradient magnitudes.
MetricResult g_ssim(const Image& x, const Image& y, const SsimConstants& c = {},
                    const WindowSpec& window = {});

double weighting_function(double z, const WeightingSpec& spec);

/// Per-pixel weights g(x_i) / sum_j g(x_j).
struct WeightingFactors {
    std::vector<double> factors;
    /// Set when every g(x_i) was zero and uniform weights were substituted.
    bool uniform_fallback = false;
};

WeightingFactors weighting_factors(const Image& x, const WeightingSpec& spec);

/// Intensity-weighted SSIM evaluated over the whole image.
MetricResult itw_ssim(const Image& x, const Image& y, const WeightingSpec& spec,
                      const SsimConstants& c = {});

/// ITW-SSIM statistics with an arbitrary weighting function. Used to check the
/// constant-weight reduction; `g` must be positive on the input values.
double itw_ssim_with(const Image& x, const Image& y, const std::function<double(double)>& g,
                     const SsimConstants& c = {});

/// Low-Information Similarity Index.
MetricResult lisi(const Image& x, const Image& y, const LisiConstants& c = {});

/// Minimum side length needed by ms_ssim for the given levels and window.
std::size_t ms_ssim_min_side(int levels, const WindowSpec& window);

/// Standard five-scale exponents.
inline constexpr double kMsSsimExponents[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

}  // namespace intensim
