#pragma once

#include "intensim/image.hpp"

#include <filesystem>
#include <string_view>

namespace intensim {

/// On-disk encodings understood by the loaders.
///
/// - png8 / png16: single-channel PNG; codes are divided by 255 / 65535.
/// - text: whitespace-separated matrix, one image row per line.
/// - raw_f64: two little-endian uint32 (width, height) followed by
///   width*height little-endian IEEE-754 doubles, row-major.
enum class ImageFormat { png8, png16, text, raw_f64 };

std::string_view to_string(ImageFormat format) noexcept;
ImageFormat parse_format(std::string_view text);

/// Picks a format from the file extension (.png inspects the bit depth).
ImageFormat guess_format(const std::filesystem::path& path);

Image load_image(const std::filesystem::path& path, ImageFormat format);
Image load_image(const std::filesystem::path& path);

/// Writes an image. PNG formats quantize round(v * maxcode) and require values in [0, 1].
void save_image(const Image& image, const std::filesystem::path& path, ImageFormat format);

}  // namespace intensim
