#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace intensim {

/// Single-channel image of finite real intensities stored row-major.
///
/// Instances are immutable once constructed. The constructor enforces
/// width * height == pixels.size(), at least two pixels, and finite values.
class Image {
public:
    Image(std::size_t width, std::size_t height, std::vector<double> pixels);

    /// Constant-valued image.
    static Image filled(std::size_t width, std::size_t height, double value);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::span<const double> pixels() const noexcept { return pixels_; }
    double operator()(std::size_t row, std::size_t col) const noexcept {
        return pixels_[row * width_ + col];
    }
    double operator[](std::size_t index) const noexcept { return pixels_[index]; }

    double min() const noexcept;
    double max() const noexcept;
    double sum() const noexcept;

    bool same_shape(const Image& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    /// True when every pixel lies in [0, 1].
    bool is_unit_range() const noexcept;

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> pixels_;
};

enum class Band { highest, lowest };

std::string_view to_string(Band band) noexcept;
Band parse_band(std::string_view text);

/// Pixel selection covering the highest or lowest intensity fraction of an image.
struct IntensityMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<bool> selected;
    Band band = Band::highest;
    double fraction = 0.0;

    std::size_t count() const noexcept;
    /// Row-major indices of the selected pixels, ascending.
    std::vector<std::size_t> indices() const;
};

struct Rect {
    std::size_t left = 0;
    std::size_t top = 0;
    std::size_t width = 0;
    std::size_t height = 0;
};

/// Maps both images through (v - min) / (max - min) using the joint range of the pair.
/// Throws DimensionMismatch or DegenerateInput.
std::pair<Image, Image> normalize_joint(const Image& x, const Image& y);

/// Selects round-half-up(fraction * N) pixels with the largest (highest) or
/// smallest (lowest) intensities. Equal intensities are ordered by row-major
/// index, lower index first.
IntensityMask intensity_mask(const Image& x, Band band, double fraction);

Image crop(const Image& x, const Rect& rect);

/// Throws DimensionMismatch when the shapes differ.
void require_same_shape(const Image& x, const Image& y);

/// Throws InvalidArgument unless every pixel lies in [0, 1].
void require_unit_range(const Image& x, std::string_view what);

}  // namespace intensim
