#pragma once

#include "intensim/image.hpp"
#include "intensim/registry.hpp"

#include <optional>
#include <string>
#include <vector>

namespace intensim {

enum class CompareMode { adjacent, first_vs_each };

std::string_view to_string(CompareMode mode) noexcept;
CompareMode parse_compare_mode(std::string_view text);

/// rows x cols partition of a frame. Cells take floor(size / n) pixels along
/// each axis; the last row and column absorb the remainder.
struct RegionGrid {
    std::size_t rows = 1;
    std::size_t cols = 1;
    /// Row-major cell labels; when empty, cells are named A1, A2, ..., B1, ...
    std::vector<std::string> labels;

    void validate() const;
    std::string label(std::size_t row, std::size_t col) const;
    /// Cell rectangle for a frame of the given size.
    Rect cell(std::size_t row, std::size_t col, std::size_t width, std::size_t height) const;
};

/// Parses "RxC", e.g. "3x4".
RegionGrid parse_grid(std::string_view text);

/// One compared pair. Vectors are indexed like SequenceReport::metrics.
struct SequenceStep {
    std::size_t index = 0;  // 1-based; cumulative is 0 at index 0
    std::size_t from = 0;   // frame indices of the compared pair
    std::size_t to = 0;
    int direc = 0;
    bool degenerate = false;  // pair was one repeated constant frame
    std::vector<double> similarity;
    std::vector<double> signed_step;
    std::vector<double> cumulative;
};

struct RegionSeries {
    std::string region;
    std::vector<SequenceStep> steps;
};

struct SequenceReport {
    std::vector<std::string> metrics;
    std::vector<RegionSeries> regions;
    nlohmann::json metadata;

    const RegionSeries* find(std::string_view region) const;
};

struct SequenceOptions {
    MetricConfig config;
    /// Normalize every frame with the range of the whole sequence instead of per pair.
    bool sequence_normalization = false;
    /// Compute direc on jointly normalized values instead of raw intensities.
    bool direc_on_normalized = false;
};

/// Scores each compared pair (a, b): jointly normalizes, evaluates every
/// metric, sets direc(a, b), signed_step = direc * (1 - similarity) and keeps
/// the running sum. The polyline therefore rises when intensity falls.
SequenceReport compare_sequence(const std::vector<Image>& frames, const std::vector<MetricId>& metrics,
                                CompareMode mode, const SequenceOptions& options = {});

/// Runs compare_sequence on every grid cell. Regions appear in row-major order.
SequenceReport compare_sequence_regions(const std::vector<Image>& frames, const RegionGrid& grid,
                                        const std::vector<MetricId>& metrics, CompareMode mode,
                                        const SequenceOptions& options = {});

enum class ReportFormat { csv, json, svg };

std::string_view to_string(ReportFormat format) noexcept;
ReportFormat parse_report_format(std::string_view text);

/// CSV columns: region,step_index,metric,similarity,direc,signed_step,cumulative
std::string emit_report(const SequenceReport& report, ReportFormat format);

}  // namespace intensim
