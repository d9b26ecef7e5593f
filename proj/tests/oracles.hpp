#pragma once

// Test-only reference computations. These are written directly from the
// defining formulas with plain loops and share no code with the library's
// filtering, downsampling or accumulation paths.

#include "intensim/image.hpp"
#include "intensim/random.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

using intensim::Image;

inline Image random_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    intensim::Rng rng(seed);
    std::vector<double> px(w * h);
    for (double& v : px) v = rng.uniform();
    return Image(w, h, std::move(px));
}

/// Random pair already jointly normalized.
inline std::pair<Image, Image> random_pair(std::size_t w, std::size_t h, std::uint64_t seed) {
    return intensim::normalize_joint(random_image(w, h, seed), random_image(w, h, seed ^ 0x5bd1e995u));
}

inline double ssim_formula(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
    return ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

/// Whole-image SSIM with N - 1 sample statistics, two-pass.
inline double global_ssim(const Image& x, const Image& y, double c1 = 1e-4, double c2 = 9e-4) {
    const double n = static_cast<double>(x.size());
    long double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = static_cast<double>(sx / n);
    const double my = static_cast<double>(sy / n);
    long double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
        cxy += (x[i] - mx) * (y[i] - my);
    }
    return ssim_formula(mx, my, static_cast<double>(vx / (n - 1)), static_cast<double>(vy / (n - 1)),
                        static_cast<double>(cxy / (n - 1)), c1, c2);
}

/// Plain row-major grid of doubles.
struct Grid {
    std::size_t w, h;
    std::vector<double> v;
    double at(std::size_t r, std::size_t c) const { return v[r * w + c]; }
};

inline Grid to_grid(const Image& img) { return {img.width(), img.height(), {img.pixels().begin(), img.pixels().end()}}; }

/// Local stats at (r, c) with a full 2-D truncated Gaussian window.
struct Local {
    double mx, my, vx, vy, cxy;
};

inline Local local_at(const Grid& x, const Grid& y, std::size_t r, std::size_t c, int size, double sigma) {
    const int half = size / 2;
    double wsum = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = -half; i <= half; ++i) {
        for (int j = -half; j <= half; ++j) {
            const long rr = static_cast<long>(r) + i;
            const long cc = static_cast<long>(c) + j;
            if (rr < 0 || cc < 0 || rr >= static_cast<long>(x.h) || cc >= static_cast<long>(x.w)) continue;
            const double w = std::exp(-(i * i + j * j) / (2 * sigma * sigma));
            const double a = x.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
            const double b = y.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc));
            wsum += w;
            sx += w * a;
            sy += w * b;
            sxx += w * a * a;
            syy += w * b * b;
            sxy += w * a * b;
        }
    }
    const double mx = sx / wsum, my = sy / wsum;
    return {mx, my, sxx / wsum - mx * mx, syy / wsum - my * my, sxy / wsum - mx * my};
}

inline double windowed_ssim(const Grid& x, const Grid& y, int size = 11, double sigma = 1.5, double c1 = 1e-4,
                            double c2 = 9e-4) {
    double total = 0;
    for (std::size_t r = 0; r < x.h; ++r) {
        for (std::size_t c = 0; c < x.w; ++c) {
            const Local l = local_at(x, y, r, c, size, sigma);
            total += ssim_formula(l.mx, l.my, l.vx, l.vy, l.cxy, c1, c2);
        }
    }
    return total / static_cast<double>(x.w * x.h);
}

inline double mean_cs(const Grid& x, const Grid& y, int size, double sigma, double c2) {
    double total = 0;
    for (std::size_t r = 0; r < x.h; ++r) {
        for (std::size_t c = 0; c < x.w; ++c) {
            const Local l = local_at(x, y, r, c, size, sigma);
            total += (2 * l.cxy + c2) / (l.vx + l.vy + c2);
        }
    }
    return total / static_cast<double>(x.w * x.h);
}

inline Grid halve(const Grid& g) {
    Grid out{g.w / 2, g.h / 2, {}};
    for (std::size_t r = 0; r < out.h; ++r) {
        for (std::size_t c = 0; c < out.w; ++c) {
            out.v.push_back((g.at(2 * r, 2 * c) + g.at(2 * r, 2 * c + 1) + g.at(2 * r + 1, 2 * c) +
                             g.at(2 * r + 1, 2 * c + 1)) /
                            4.0);
        }
    }
    return out;
}

inline double ms_ssim(Grid x, Grid y, int levels, int size = 11, double sigma = 1.5, double c1 = 1e-4,
                      double c2 = 9e-4) {
    const double w[5] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
    double wsum = 0;
    for (int j = 0; j < levels; ++j) wsum += w[j];
    double result = 1;
    for (int j = 0; j < levels; ++j) {
        const double v = (j + 1 == levels) ? windowed_ssim(x, y, size, sigma, c1, c2) : mean_cs(x, y, size, sigma, c2);
        result *= (v < 0 ? -1.0 : 1.0) * std::pow(std::abs(v), w[j] / wsum);
        x = halve(x);
        y = halve(y);
    }
    return result;
}

/// Sobel gradient magnitude with replicated borders.
inline Grid sobel(const Grid& g) {
    auto p = [&](long r, long c) {
        r = std::max(0L, std::min(r, static_cast<long>(g.h) - 1));
        c = std::max(0L, std::min(c, static_cast<long>(g.w) - 1));
        return g.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    };
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    Grid out{g.w, g.h, {}};
    for (long r = 0; r < static_cast<long>(g.h); ++r) {
        for (long c = 0; c < static_cast<long>(g.w); ++c) {
            double gx = 0, gy = 0;
            for (int i = 0; i < 3; ++i) {
                for (int j = 0; j < 3; ++j) {
                    gx += kx[i][j] * p(r + i - 1, c + j - 1);
                    gy += kx[j][i] * p(r + i - 1, c + j - 1);
                }
            }
            out.v.push_back(std::sqrt(gx * gx + gy * gy));
        }
    }
    return out;
}

inline double g_ssim(const Grid& x, const Grid& y, int size = 11, double sigma = 1.5, double c1 = 1e-4,
                     double c2 = 9e-4) {
    const Grid gx = sobel(x), gy = sobel(y);
    double total = 0;
    for (std::size_t r = 0; r < x.h; ++r) {
        for (std::size_t c = 0; c < x.w; ++c) {
            const Local li = local_at(x, y, r, c, size, sigma);
            const Local lg = local_at(gx, gy, r, c, size, sigma);
            total += ((2 * li.mx * li.my + c1) / (li.mx * li.mx + li.my * li.my + c1)) *
                     ((2 * lg.cxy + c2) / (lg.vx + lg.vy + c2));
        }
    }
    return total / static_cast<double>(x.w * x.h);
}

/// LISI straight from its definition.
inline double lisi(const Image& x, const Image& y, double c1 = 1e-4, double c2 = 1e-4) {
    const double d = c1 / 2;
    long double num = 0, sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += std::abs(x[i] + y[i]) / (std::abs(x[i] - y[i]) + c1);
        sx += x[i];
        sy += y[i];
    }
    return static_cast<double>(d * num / (std::max(sx, sy) + c2));
}

}  // namespace oracle
