#include "intensim/image_io.hpp"

#include "intensim/error.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

namespace intensim {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) throw IoError("cannot open '" + path.string() + "': " + std::strerror(errno));
    return f;
}

[[noreturn]] void png_fail(png_structp png, png_const_charp msg) {
    auto* buf = static_cast<std::string*>(png_get_error_ptr(png));
    if (buf) *buf = msg;
    png_longjmp(png, 1);
}

void png_warn(png_structp, png_const_charp) {}

struct PngHeader {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    int bit_depth = 0;
    int color_type = 0;
};

// Reads the header and, when `codes` is non-null, all sample codes.
PngHeader read_png(const std::filesystem::path& path, std::vector<std::uint16_t>* codes) {
    FilePtr file = open_file(path, "rb");
    std::array<unsigned char, 8> sig{};
    if (std::fread(sig.data(), 1, sig.size(), file.get()) != sig.size() ||
        png_sig_cmp(sig.data(), 0, sig.size()) != 0) {
        throw IoError("'" + path.string() + "' is not a PNG file");
    }

    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
    if (!png) throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng initialisation failed");
    }

    PngHeader header;
    std::vector<png_bytep> rows;
    std::vector<unsigned char> raw;
    volatile bool failed = false;
    volatile bool color = false;

    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, file.get());
        png_set_sig_bytes(png, static_cast<int>(sig.size()));
        png_read_info(png, info);
        header.width = png_get_image_width(png, info);
        header.height = png_get_image_height(png, info);
        header.bit_depth = png_get_bit_depth(png, info);
        header.color_type = png_get_color_type(png, info);
        color = header.color_type != PNG_COLOR_TYPE_GRAY;
        if (codes && !color && (header.bit_depth == 8 || header.bit_depth == 16)) {
            if (header.bit_depth == 16) png_set_swap(png);  // host little-endian order
            png_read_update_info(png, info);
            const std::size_t stride = png_get_rowbytes(png, info);
            raw.resize(stride * header.height);
            rows.resize(header.height);
            for (std::size_t r = 0; r < header.height; ++r) rows[r] = raw.data() + r * stride;
            png_read_image(png, rows.data());
            png_read_end(png, nullptr);
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (failed) throw IoError("cannot decode '" + path.string() + "': " + message);
    if (color) {
        throw IoError("'" + path.string() + "' is not single-channel grayscale; convert it first");
    }
    if (codes && !raw.empty()) {
        const std::size_t n = std::size_t{header.width} * header.height;
        codes->resize(n);
        if (header.bit_depth == 8) {
            std::copy(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(n), codes->begin());
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                std::uint16_t v;
                std::memcpy(&v, raw.data() + 2 * i, 2);
                (*codes)[i] = v;
            }
        }
    }
    return header;
}

Image load_png(const std::filesystem::path& path, int expected_depth) {
    std::vector<std::uint16_t> codes;
    const PngHeader header = read_png(path, &codes);
    if (header.bit_depth != expected_depth) {
        throw IoError("'" + path.string() + "' has bit depth " + std::to_string(header.bit_depth) +
                      ", expected " + std::to_string(expected_depth));
    }
    const double scale = expected_depth == 8 ? 255.0 : 65535.0;
    std::vector<double> pixels(codes.size());
    std::transform(codes.begin(), codes.end(), pixels.begin(),
                   [scale](std::uint16_t c) { return static_cast<double>(c) / scale; });
    return Image(header.width, header.height, std::move(pixels));
}

void save_png(const Image& image, const std::filesystem::path& path, int depth) {
    if (!image.is_unit_range()) throw InvalidArgument("PNG output requires values in [0, 1]");
    const double scale = depth == 8 ? 255.0 : 65535.0;
    const std::size_t bytes = depth == 8 ? 1 : 2;
    std::vector<unsigned char> raw(image.size() * bytes);
    for (std::size_t i = 0; i < image.size(); ++i) {
        const auto code = static_cast<std::uint16_t>(std::lround(image[i] * scale));
        if (depth == 8) {
            raw[i] = static_cast<unsigned char>(code);
        } else {
            raw[2 * i] = static_cast<unsigned char>(code >> 8);  // PNG is big-endian
            raw[2 * i + 1] = static_cast<unsigned char>(code & 0xff);
        }
    }

    FilePtr file = open_file(path, "wb");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_fail, png_warn);
    if (!png) throw IoError("libpng initialisation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng initialisation failed");
    }
    std::vector<png_bytep> rows(image.height());
    const std::size_t stride = image.width() * bytes;
    for (std::size_t r = 0; r < image.height(); ++r) rows[r] = raw.data() + r * stride;

    volatile bool failed = false;
    if (setjmp(png_jmpbuf(png))) {
        failed = true;
    } else {
        png_init_io(png, file.get());
        png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
                     static_cast<png_uint_32>(image.height()), depth, PNG_COLOR_TYPE_GRAY,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        png_write_image(png, rows.data());
        png_write_end(png, nullptr);
    }
    png_destroy_write_struct(&png, &info);
    if (failed) throw IoError("cannot write '" + path.string() + "': " + message);
}

Image load_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<double> pixels;
    std::size_t width = 0;
    std::size_t height = 0;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::size_t count = 0;
        std::string token;
        while (row >> token) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(token, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != token.size()) {
                throw IoError("'" + path.string() + "': cannot parse '" + token + "' on row " +
                              std::to_string(height + 1));
            }
            if (!std::isfinite(v)) throw IoError("'" + path.string() + "' contains a non-finite value");
            pixels.push_back(v);
            ++count;
        }
        if (count == 0) continue;
        if (width == 0) {
            width = count;
        } else if (count != width) {
            throw IoError("'" + path.string() + "': row " + std::to_string(height + 1) + " has " +
                          std::to_string(count) + " values, expected " + std::to_string(width));
        }
        ++height;
    }
    if (height == 0) throw IoError("'" + path.string() + "' contains no data");
    try {
        return Image(width, height, std::move(pixels));
    } catch (const Error& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

void save_text(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.precision(17);
    for (std::size_t r = 0; r < image.height(); ++r) {
        for (std::size_t c = 0; c < image.width(); ++c) {
            if (c) out << ' ';
            out << image(r, c);
        }
        out << '\n';
    }
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

template <typename T>
T from_le(const unsigned char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        auto* b = reinterpret_cast<unsigned char*>(&v);
        std::reverse(b, b + sizeof(T));
    }
    return v;
}

template <typename T>
void to_le(T v, std::ostream& out) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

Image load_raw(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 8) throw IoError("'" + path.string() + "' is too short for a raw-f64 header");
    const auto width = from_le<std::uint32_t>(bytes.data());
    const auto height = from_le<std::uint32_t>(bytes.data() + 4);
    const std::size_t n = std::size_t{width} * height;
    if (bytes.size() != 8 + 8 * n) {
        throw IoError("'" + path.string() + "': payload of " + std::to_string(bytes.size() - 8) +
                      " bytes does not match " + std::to_string(width) + "x" + std::to_string(height));
    }
    std::vector<double> pixels(n);
    for (std::size_t i = 0; i < n; ++i) {
        pixels[i] = from_le<double>(bytes.data() + 8 + 8 * i);
        if (!std::isfinite(pixels[i])) throw IoError("'" + path.string() + "' contains a non-finite value");
    }
    try {
        return Image(width, height, std::move(pixels));
    } catch (const Error& e) {
        throw IoError("'" + path.string() + "': " + e.what());
    }
}

void save_raw(const Image& image, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    to_le(static_cast<std::uint32_t>(image.width()), out);
    to_le(static_cast<std::uint32_t>(image.height()), out);
    for (double v : image.pixels()) to_le(v, out);
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

}  // namespace

std::string_view to_string(ImageFormat format) noexcept {
    switch (format) {
        case ImageFormat::png8: return "png8";
        case ImageFormat::png16: return "png16";
        case ImageFormat::text: return "text";
        case ImageFormat::raw_f64: return "raw-f64";
    }
    return "unknown";
}

ImageFormat parse_format(std::string_view text) {
    if (text == "png8") return ImageFormat::png8;
    if (text == "png16") return ImageFormat::png16;
    if (text == "text" || text == "text-matrix") return ImageFormat::text;
    if (text == "raw-f64" || text == "raw") return ImageFormat::raw_f64;
    throw InvalidArgument("unknown image format '" + std::string(text) + "'");
}

ImageFormat guess_format(const std::filesystem::path& path) {
    const std::string ext = lower_extension(path);
    if (ext == ".png") {
        const PngHeader header = read_png(path, nullptr);
        return header.bit_depth == 16 ? ImageFormat::png16 : ImageFormat::png8;
    }
    if (ext == ".txt" || ext == ".dat" || ext == ".csv" || ext == ".mat") return ImageFormat::text;
    if (ext == ".f64" || ext == ".raw" || ext == ".bin") return ImageFormat::raw_f64;
    throw IoError("cannot infer image format of '" + path.string() + "' from its extension");
}

Image load_image(const std::filesystem::path& path, ImageFormat format) {
    switch (format) {
        case ImageFormat::png8: return load_png(path, 8);
        case ImageFormat::png16: return load_png(path, 16);
        case ImageFormat::text: return load_text(path);
        case ImageFormat::raw_f64: return load_raw(path);
    }
    throw InvalidArgument("unknown image format");
}

Image load_image(const std::filesystem::path& path) { return load_image(path, guess_format(path)); }

void save_image(const Image& image, const std::filesystem::path& path, ImageFormat format) {
    switch (format) {
        case ImageFormat::png8: save_png(image, path, 8); return;
        case ImageFormat::png16: save_png(image, path, 16); return;
        case ImageFormat::text: save_text(image, path); return;
        case ImageFormat::raw_f64: save_raw(image, path); return;
    }
}

}  // namespace intensim
