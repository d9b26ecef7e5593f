#include "intensim/image.hpp"

#include "intensim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace intensim {

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
    if (width == 0 || height == 0) {
        throw InvalidArgument("image dimensions must be positive");
    }
    if (pixels_.size() != width * height) {
        throw DimensionMismatch("pixel count " + std::to_string(pixels_.size()) +
                                " does not match " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    if (pixels_.size() < 2) {
        throw InvalidArgument("image must contain at least two pixels");
    }
    for (double v : pixels_) {
        if (!std::isfinite(v)) {
            throw InvalidArgument("image contains a non-finite value");
        }
    }
}

Image Image::filled(std::size_t width, std::size_t height, double value) {
    return Image(width, height, std::vector<double>(width * height, value));
}

double Image::min() const noexcept { return *std::min_element(pixels_.begin(), pixels_.end()); }

double Image::max() const noexcept { return *std::max_element(pixels_.begin(), pixels_.end()); }

double Image::sum() const noexcept { return std::accumulate(pixels_.begin(), pixels_.end(), 0.0); }

bool Image::is_unit_range() const noexcept {
    return std::all_of(pixels_.begin(), pixels_.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

std::string_view to_string(Band band) noexcept {
    return band == Band::highest ? "highest" : "lowest";
}

Band parse_band(std::string_view text) {
    if (text == "highest" || text == "high") return Band::highest;
    if (text == "lowest" || text == "low") return Band::lowest;
    throw InvalidArgument("unknown band '" + std::string(text) + "'");
}

std::size_t IntensityMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
}

std::vector<std::size_t> IntensityMask::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i]) out.push_back(i);
    }
    return out;
}

void require_same_shape(const Image& x, const Image& y) {
    if (!x.same_shape(y)) {
        throw DimensionMismatch("image dimensions differ: " + std::to_string(x.width()) + "x" +
                                std::to_string(x.height()) + " vs " + std::to_string(y.width()) +
                                "x" + std::to_string(y.height()));
    }
}

void require_unit_range(const Image& x, std::string_view what) {
    if (!x.is_unit_range()) {
        throw InvalidArgument(std::string(what) +
                              ": input must be jointly normalized to [0, 1] first");
    }
}

std::pair<Image, Image> normalize_joint(const Image& x, const Image& y) {
    require_same_shape(x, y);
    const double lo = std::min(x.min(), y.min());
    const double hi = std::max(x.max(), y.max());
    const double range = hi - lo;
    if (!(range > 0.0)) {
        throw DegenerateInput("degenerate input: joint intensity range is zero");
    }
    auto map = [&](const Image& img) {
        std::vector<double> out(img.size());
        std::transform(img.pixels().begin(), img.pixels().end(), out.begin(),
                       [&](double v) { return std::clamp((v - lo) / range, 0.0, 1.0); });
        return Image(img.width(), img.height(), std::move(out));
    };
    return {map(x), map(y)};
}

IntensityMask intensity_mask(const Image& x, Band band, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw InvalidArgument("mask fraction must lie in (0, 1)");
    }
    const std::size_t n = x.size();
    const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto px = x.pixels();
    if (band == Band::highest) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return px[a] > px[b]; });
    } else {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return px[a] < px[b]; });
    }

    IntensityMask mask{x.width(), x.height(), std::vector<bool>(n, false), band, fraction};
    for (std::size_t k = 0; k < count; ++k) mask.selected[order[k]] = true;
    return mask;
}

Image crop(const Image& x, const Rect& rect) {
    if (rect.width == 0 || rect.height == 0 || rect.left + rect.width > x.width() ||
        rect.top + rect.height > x.height()) {
        throw InvalidArgument("crop rectangle (" + std::to_string(rect.left) + "," +
                              std::to_string(rect.top) + "," + std::to_string(rect.width) + "," +
                              std::to_string(rect.height) + ") lies outside the image");
    }
    std::vector<double> out;
    out.reserve(rect.width * rect.height);
    for (std::size_t r = rect.top; r < rect.top + rect.height; ++r) {
        for (std::size_t c = rect.left; c < rect.left + rect.width; ++c) out.push_back(x(r, c));
    }
    return Image(rect.width, rect.height, std::move(out));
}

}  // namespace intensim
