#pragma once

#include "intensim/image.hpp"
#include "intensim/synth.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fixture {

using intensim::Image;

inline Image affine(const Image& x, double scale, double offset) {
    std::vector<double> px(x.pixels().begin(), x.pixels().end());
    for (double& v : px) v = v * scale + offset;
    return Image(x.width(), x.height(), std::move(px));
}

/// Three frames: a seeded scene, the scene brightened, then dimmed below the start.
inline std::vector<Image> brighten_dim_frames(std::uint64_t seed) {
    const Image base = intensim::synthetic_natural(24, 24, seed);
    const Image drift = intensim::synthetic_natural(24, 24, seed + 1);
    std::vector<double> mid(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) mid[i] = 0.5 * base[i] + 0.35 + 0.05 * drift[i];
    return {affine(base, 0.5, 0.2), Image(24, 24, std::move(mid)), affine(base, 0.5, 0.1)};
}

inline std::filesystem::path golden_path(const std::string& name) {
    return std::filesystem::path(INTENSIM_GOLDEN_DIR) / name;
}

/// Reads a golden file; with INTENSIM_UPDATE_GOLDENS set, rewrites it from `actual` first.
inline std::string golden(const std::string& name, const std::string& actual) {
    const auto path = golden_path(name);
    if (std::getenv("INTENSIM_UPDATE_GOLDENS")) std::ofstream(path, std::ios::binary) << actual;
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace fixture
