#pragma once

#include "intensim/image.hpp"
#include "intensim/registry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace intensim {

enum class NoiseDistribution { uniform, gaussian, rayleigh };

std::string_view to_string(NoiseDistribution d) noexcept;
NoiseDistribution parse_distribution(std::string_view text);

/// Additive noise confined to an intensity band.
///
/// amplitude is the half-width for uniform noise on [-a, a], the standard
/// deviation for Gaussian noise, and the scale of (non-negative) Rayleigh noise.
/// coverage is the share of band pixels that receive noise; which ones is
/// drawn from the seed.
struct NoiseSpec {
    NoiseDistribution distribution = NoiseDistribution::uniform;
    double amplitude = 0.1;
    Band band = Band::highest;
    double fraction = 0.35;
    std::uint64_t seed = 0;
    double coverage = 1.0;

    void validate() const;
};

/// Adds noise inside intensity_mask(x, band, fraction) and clamps to [0, 1].
/// Pixels outside the noisy set are copied bit for bit. Each variate is a
/// unit-scale draw multiplied by the amplitude, so a fixed seed gives noise
/// patterns that scale linearly with amplitude.
Image inject_noise(const Image& x, const NoiseSpec& spec);

struct CurvePair {
    Image reference;
    Image perturbed;
    double level = 1.0;
};

/// For each similarity level s, replaces round((1 - s) * |band|) randomly chosen
/// band pixels of `base` by uniform values on [0, 1].
std::vector<CurvePair> generate_curve_pairs(const Image& base, const std::vector<double>& levels, Band band,
                                            std::uint64_t seed, double fraction = 0.35);

struct CurvePoint {
    double level = 1.0;
    Band band = Band::highest;
    std::map<std::string, double> scores;
};

/// Characteristic curves for both bands, highest first, levels ascending.
std::vector<CurvePoint> run_characteristic_curves(const Image& base, const std::vector<MetricId>& metrics,
                                                  const std::vector<double>& levels, std::uint64_t seed,
                                                  const MetricConfig& config = {}, double fraction = 0.35);

std::string curves_to_csv(const std::vector<CurvePoint>& points);
std::string curves_to_svg(const std::vector<CurvePoint>& points);

struct NoiseRow {
    std::string group;
    std::size_t ref_index = 0;
    std::size_t spec_index = 0;
    std::size_t repeat = 0;
    NoiseDistribution distribution = NoiseDistribution::uniform;
    double amplitude = 0.0;
    Band band = Band::highest;
    std::string metric;
    double score = 0.0;
    /// Empty when the baseline scored exactly 1 and sensi is undefined.
    std::optional<double> sensi;
};

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

struct SensiSummary {
    std::string group;
    std::string metric;
    std::size_t count = 0;
    std::size_t undefined = 0;
    double mean = 0.0;
    double sd = 0.0;
    Histogram histogram;
};

struct NoiseGroupReport {
    std::string baseline;
    std::uint64_t seed = 0;
    std::vector<NoiseRow> rows;
    std::vector<SensiSummary> summaries;

    const SensiSummary* find(std::string_view group, std::string_view metric) const;
};

struct NoiseGroupOptions {
    MetricId baseline = MetricId::ssim_windowed;
    MetricConfig config;
    std::size_t bins = 20;
};

/// Scores every (reference, spec, repeat) noisy image against its reference and
/// computes sensi of each metric against the baseline. Rows are grouped by band
/// ("highest" / "lowest"). Repeat k of spec j on reference i uses a seed derived
/// from (seed, i, j, k); the seed stored in each spec is ignored.
NoiseGroupReport run_noise_groups(const std::vector<Image>& refs, const std::vector<NoiseSpec>& specs,
                                  const std::vector<MetricId>& metrics, std::size_t repeats, std::uint64_t seed,
                                  const NoiseGroupOptions& options = {});

/// CSV columns: group,ref,repeat,distribution,amplitude,band,metric,score,sensi
std::string noise_rows_to_csv(const NoiseGroupReport& report);
/// Histogram bin edges and counts plus mean and SD per metric per group.
nlohmann::json noise_histograms_to_json(const NoiseGroupReport& report);
/// Plain-text table of mean and SD of sensi per group.
std::string noise_summary_table(const NoiseGroupReport& report);

/// Low-information test image: a handful of Gaussian sources on a dim,
/// slowly varying background with faint texture, normalized to [0, 1].
Image synthetic_reference(std::size_t width, std::size_t height, std::uint64_t seed);

/// Natural-image stand-in: two octaves of smoothed random texture spanning the
/// full intensity range, normalized to [0, 1].
Image synthetic_natural(std::size_t width, std::size_t height, std::uint64_t seed);

}  // namespace intensim
