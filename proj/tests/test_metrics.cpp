#include "intensim/error.hpp"
#include "intensim/metrics.hpp"
#include "intensim/registry.hpp"
#include "intensim/synth.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace intensim;
using doctest::Approx;

namespace {

// Pixelwise box blur used to build structured test pairs.
Image box_blur(const Image& x) {
    std::vector<double> out(x.size());
    const long w = static_cast<long>(x.width()), h = static_cast<long>(x.height());
    for (long r = 0; r < h; ++r) {
        for (long c = 0; c < w; ++c) {
            double s = 0;
            int n = 0;
            for (long i = r - 1; i <= r + 1; ++i)
                for (long j = c - 1; j <= c + 1; ++j)
                    if (i >= 0 && j >= 0 && i < h && j < w) {
                        s += x(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
                        ++n;
                    }
            out[static_cast<std::size_t>(r * w + c)] = s / n;
        }
    }
    return Image(x.width(), x.height(), std::move(out));
}

}  // namespace

TEST_CASE("global ssim hand oracle") {
    const Image x(2, 1, {0.0, 1.0});
    const Image y(2, 1, {1.0, 0.0});
    const double expected = (0.5001 * -0.9991) / (0.5001 * 1.0009);
    CHECK(ssim_global(x, y).score == Approx(expected).epsilon(1e-12));
    CHECK(ssim_global(x, y).score == Approx(-0.99820).epsilon(1e-4));
    CHECK(ssim_global(x, x).score == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scaled pair is identical after joint normalization") {
    const auto [nx, ny] = normalize_joint(Image(2, 1, {0.0, 2.0}), Image(2, 1, {0.0, 2.0}));
    CHECK(ssim_global(nx, ny).score == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("global ssim matches two-pass oracle") {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const auto [x, y] = oracle::random_pair(3 + s % 7, 2 + s % 5, s);
        CHECK(ssim_global(x, y).score == Approx(oracle::global_ssim(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("windowed ssim matches brute-force 2-D window oracle") {
    const std::size_t sizes[][2] = {{11, 11}, {16, 16}, {23, 13}, {12, 30}};
    std::uint64_t seed = 100;
    for (const auto& sz : sizes) {
        const auto [x, y] = oracle::random_pair(sz[0], sz[1], seed++);
        const double got = ssim_windowed(x, y).score;
        CHECK(got == Approx(oracle::windowed_ssim(oracle::to_grid(x), oracle::to_grid(y))).epsilon(1e-10));
    }
    const auto [x, y] = oracle::random_pair(9, 7, 7);
    CHECK(ssim_windowed(x, y, {}, {5, 1.0}).score ==
          Approx(oracle::windowed_ssim(oracle::to_grid(x), oracle::to_grid(y), 5, 1.0)).epsilon(1e-10));
}

TEST_CASE("windowed ssim rejects oversized or even windows") {
    const auto [x, y] = oracle::random_pair(8, 8, 1);
    CHECK_THROWS_AS(ssim_windowed(x, y), InvalidArgument);
    CHECK_THROWS_AS(ssim_windowed(x, y, {}, {4, 1.0}), InvalidArgument);
}

TEST_CASE("windowed and global ssim differ on a 16x16 random pair") {
    const auto [x, y] = oracle::random_pair(16, 16, 2024);
    const double w = ssim_windowed(x, y).score;
    const double g = ssim_global(x, y).score;
    CHECK(std::abs(w - g) > 1e-6);
}

TEST_CASE("constant patch shift lowers windowed ssim") {
    std::vector<double> a(20 * 20), b;
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = 0.5 + 0.4 * std::sin(0.37 * static_cast<double>(i));
    b = a;
    for (std::size_t r = 5; r < 10; ++r)
        for (std::size_t c = 5; c < 10; ++c) {
            a[r * 20 + c] = 0.25;
            b[r * 20 + c] = 0.75;
        }
    const Image x(20, 20, a), y(20, 20, b);
    CHECK(ssim_windowed(x, y).score < ssim_windowed(x, x).score);
}

TEST_CASE("ms-ssim matches brute-force pyramid oracle") {
    for (int levels = 1; levels <= 3; ++levels) {
        const std::size_t side = ms_ssim_min_side(levels, {}) + 3;
        const auto [x, y] = oracle::random_pair(side, side + 2, 300 + static_cast<std::uint64_t>(levels));
        CHECK(ms_ssim(x, y, {}, levels).score ==
              Approx(oracle::ms_ssim(oracle::to_grid(x), oracle::to_grid(y), levels)).epsilon(1e-10));
    }
    const auto [x, y] = oracle::random_pair(40, 40, 9);
    CHECK(ms_ssim(x, y, {}, 4, {5, 1.0}).score ==
          Approx(oracle::ms_ssim(oracle::to_grid(x), oracle::to_grid(y), 4, 5, 1.0)).epsilon(1e-10));
}

TEST_CASE("ms-ssim with one level equals windowed ssim") {
    const auto [x, y] = oracle::random_pair(24, 19, 5);
    CHECK(ms_ssim(x, y, {}, 1).score == Approx(ssim_windowed(x, y).score).epsilon(1e-14));
}

TEST_CASE("ms-ssim level and size validation") {
    CHECK(ms_ssim_min_side(5, {}) == 176);
    const auto [x, y] = oracle::random_pair(43, 43, 5);
    CHECK_THROWS_AS(ms_ssim(x, y, {}, 3), InvalidArgument);
    CHECK_THROWS_AS(ms_ssim(x, y, {}, 0), InvalidArgument);
    CHECK_THROWS_AS(ms_ssim(x, y, {}, 6), InvalidArgument);
}

TEST_CASE("g-ssim matches brute-force oracle") {
    const auto [x3, y3] = oracle::random_pair(3, 3, 33);
    CHECK(g_ssim(x3, y3, {}, {3, 1.5}).score ==
          Approx(oracle::g_ssim(oracle::to_grid(x3), oracle::to_grid(y3), 3, 1.5)).epsilon(1e-10));
    const auto [x, y] = oracle::random_pair(17, 14, 34);
    CHECK(g_ssim(x, y).score == Approx(oracle::g_ssim(oracle::to_grid(x), oracle::to_grid(y))).epsilon(1e-10));
    CHECK_THROWS_AS(g_ssim(Image(2, 2, {0, 1, 0, 1}), Image(2, 2, {0, 1, 0, 1}), {}, {1, 1.0}), InvalidArgument);
}

TEST_CASE("g-ssim hand-computed 3x3 gradient case") {
    // Ramp left to right: Sobel gx is 8 * step in the interior column and 4 * step at replicated borders.
    const Image x(3, 3, {0.0, 0.5, 1.0, 0.0, 0.5, 1.0, 0.0, 0.5, 1.0});
    const oracle::Grid g = oracle::sobel(oracle::to_grid(x));
    CHECK(g.at(1, 1) == Approx(4.0));
    CHECK(g.at(0, 0) == Approx(2.0));
    CHECK(g_ssim(x, x, {}, {3, 1.5}).score == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("g-ssim penalizes a flat-region shift less than windowed ssim") {
    const std::size_t w = 32, h = 32;
    std::vector<double> a(w * h);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) a[r * w + c] = 0.3 + 0.2 * std::sin(0.9 * static_cast<double>(r * c));
    for (std::size_t r = 8; r < 24; ++r)
        for (std::size_t c = 8; c < 24; ++c) a[r * w + c] = 0.2;
    std::vector<double> b = a;
    for (std::size_t r = 8; r < 24; ++r)
        for (std::size_t c = 8; c < 24; ++c) b[r * w + c] += 0.5;
    const auto [x, y] = normalize_joint(Image(w, h, a), Image(w, h, b));
    const double gs = g_ssim(x, y).score;
    const double ws = ssim_windowed(x, y).score;
    CHECK(gs > ws);
    CHECK(gs < 1.0);
}

TEST_CASE("weighting functions at reference points") {
    CHECK(weighting_function(1.0, WeightingSpec::gaussian()) == Approx(1.0));
    CHECK(weighting_function(0.0, WeightingSpec::gaussian()) == Approx(std::exp(-2.0)).epsilon(1e-15));
    CHECK(weighting_function(0.0, WeightingSpec::gaussian()) == Approx(0.135335).epsilon(1e-5));
    CHECK(weighting_function(0.0, WeightingSpec::tanh()) == 0.0);
    CHECK(weighting_function(1.0, WeightingSpec::tanh()) == Approx(0.964028).epsilon(1e-6));
    CHECK(weighting_function(0.5, WeightingSpec::sigmoid()) == Approx(0.5).epsilon(1e-15));
    CHECK_THROWS_AS(weighting_function(1.5, WeightingSpec::tanh()), InvalidArgument);
    CHECK_THROWS_AS(weighting_function(-0.1, WeightingSpec::gaussian()), InvalidArgument);
}

TEST_CASE("weighting functions are increasing with values in (0,1)") {
    for (const auto& spec : {WeightingSpec::gaussian(), WeightingSpec::tanh(), WeightingSpec::sigmoid()}) {
        double prev = weighting_function(0.0, spec);
        for (int i = 1; i < 1000; ++i) {
            const double v = weighting_function(i / 1000.0, spec);
            CHECK(v > prev);
            CHECK(v > 0.0);
            CHECK(v < 1.0);
            prev = v;
        }
    }
}

TEST_CASE("weighting factors") {
    const auto f = weighting_factors(Image(2, 1, {0.0, 1.0}), WeightingSpec::gaussian());
    const double e = std::exp(-2.0);
    CHECK(f.factors[0] == Approx(e / (1 + e)).epsilon(1e-14));
    CHECK(f.factors[1] == Approx(1 / (1 + e)).epsilon(1e-14));
    CHECK(f.factors[0] == Approx(0.1192).epsilon(1e-3));
    CHECK_FALSE(f.uniform_fallback);

    const auto u = weighting_factors(Image::filled(3, 3, 0.4), WeightingSpec::sigmoid());
    for (double v : u.factors) CHECK(v == Approx(1.0 / 9.0).epsilon(1e-15));

    const auto z = weighting_factors(Image::filled(2, 2, 0.0), WeightingSpec::tanh());
    CHECK(z.uniform_fallback);
    for (double v : z.factors) CHECK(v == 0.25);
}

TEST_CASE("itw-ssim with constant weights reduces to global ssim") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto [x, y] = oracle::random_pair(5 + s, 4 + s % 3, 500 + s);
        CHECK(itw_ssim_with(x, y, [](double) { return 0.7; }) == Approx(ssim_global(x, y).score).epsilon(1e-12));
    }
}

TEST_CASE("itw-ssim statistics follow the weighted definition") {
    const auto [x, y] = oracle::random_pair(6, 5, 77);
    const auto spec = WeightingSpec::sigmoid();
    const auto fx = weighting_factors(x, spec).factors;
    const auto fy = weighting_factors(y, spec).factors;
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += fx[i] * x[i];
        my += fy[i] * y[i];
    }
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = fx[i] * n * x[i] - mx, b = fy[i] * n * y[i] - my;
        vx += a * a;
        vy += b * b;
        cxy += a * b;
    }
    const double expected = oracle::ssim_formula(mx, my, vx / (n - 1), vy / (n - 1), cxy / (n - 1), 1e-4, 9e-4);
    CHECK(itw_ssim(x, y, spec).score == Approx(expected).epsilon(1e-12));
    CHECK(itw_ssim(x, y, spec).metric == "itw:sigmoid");
}

TEST_CASE("lisi oracles") {
    CHECK(lisi(Image(2, 1, {1.0, 1.0}), Image(2, 1, {1.0, 1.0})).score == Approx(2.0 / (2.0 + 1e-4)).epsilon(1e-14));
    CHECK(lisi(Image(2, 1, {1.0, 1.0}), Image(2, 1, {1.0, 1.0})).score == Approx(0.99995).epsilon(1e-6));
    CHECK(lisi(Image::filled(2, 2, 0.0), Image::filled(2, 2, 0.0)).score == 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto [x, y] = oracle::random_pair(9, 8, 900 + s);
        CHECK(lisi(x, y).score == Approx(oracle::lisi(x, y)).epsilon(1e-12));
    }
}

TEST_CASE("lisi identity equals S/(S+c2)") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Image x = oracle::random_image(10, 3, s);
        const double total = x.sum();
        CHECK(lisi(x, x).score == Approx(total / (total + 1e-4)).epsilon(1e-12));
    }
}

TEST_CASE("metrics are symmetric") {
    MetricConfig cfg;
    cfg.ms_levels = 2;
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto [x, y] = oracle::random_pair(24, 26, 1200 + s);
        for (MetricId id : default_metrics()) {
            if (id == MetricId::itw_gaussian || id == MetricId::itw_tanh || id == MetricId::itw_sigmoid) continue;
            CHECK(evaluate(id, x, y, cfg).score == Approx(evaluate(id, y, x, cfg).score).epsilon(1e-12));
        }
    }
}

TEST_CASE("itw-ssim and lisi identities on random images") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Image x = oracle::random_image(12, 12, 40 + s);
        for (const auto& spec : {WeightingSpec::gaussian(), WeightingSpec::tanh(), WeightingSpec::sigmoid()})
            CHECK(itw_ssim(x, x, spec).score == Approx(1.0).epsilon(1e-12));
        CHECK(ssim_windowed(x, x).score == Approx(1.0).epsilon(1e-12));
        CHECK(g_ssim(x, x).score == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("scores stay in range") {
    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto [x, y] = oracle::random_pair(2 + s % 9, 1 + s % 4, 7000 + s);
        const double l = lisi(x, y).score;
        CHECK(l >= 0.0);
        CHECK(l < 1.0);
        const double g = ssim_global(x, y).score;
        CHECK(g >= -1.0);
        CHECK(g <= 1.0);
        for (const auto& spec : {WeightingSpec::gaussian(), WeightingSpec::tanh(), WeightingSpec::sigmoid()}) {
            const double v = itw_ssim(x, y, spec).score;
            CHECK(v >= -1.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("metrics validate inputs") {
    const Image x(2, 2, {0, 1, 0.5, 0.5});
    CHECK_THROWS_AS(ssim_global(x, Image(4, 1, {0, 1, 0.5, 0.5})), DimensionMismatch);
    CHECK_THROWS_AS(lisi(x, Image(2, 2, {0, 2, 0.5, 0.5})), InvalidArgument);
}

namespace {

struct BandPair {
    std::pair<Image, Image> high, low;
};

BandPair band_perturbed(int i) {
    const Image ref = synthetic_natural(64, 64, derive_seed(77, static_cast<std::uint64_t>(i)));
    NoiseSpec hi{NoiseDistribution::uniform, 0.1, Band::highest, 0.35, static_cast<std::uint64_t>(i), 1.0};
    NoiseSpec lo = hi;
    lo.band = Band::lowest;
    return {normalize_joint(ref, inject_noise(ref, hi)), normalize_joint(ref, inject_noise(ref, lo))};
}

}  // namespace

TEST_CASE("high-band perturbation lowers lisi more than low-band") {
    for (int i = 0; i < 20; ++i) {
        const auto p = band_perturbed(i);
        CHECK(1 - lisi(p.high.first, p.high.second).score > 1 - lisi(p.low.first, p.low.second).score);
    }
}

// Holds for most references but not all: a low-band change also raises the
// pixel's own weight, which can move ITW statistics more than a high-band change.
TEST_CASE("high-band perturbation lowers itw-ssim more than low-band" * doctest::may_fail()) {
    const WeightingSpec specs[3] = {WeightingSpec::gaussian(), WeightingSpec::tanh(), WeightingSpec::sigmoid()};
    for (int i = 0; i < 20; ++i) {
        const auto p = band_perturbed(i);
        for (const auto& spec : specs) {
            CAPTURE(i);
            CAPTURE(spec.describe());
            CHECK(1 - itw_ssim(p.high.first, p.high.second, spec).score >
                  1 - itw_ssim(p.low.first, p.low.second, spec).score);
        }
    }
}

// Frozen after cross-checking against the brute-force oracles.
constexpr double kGoldenWindowed = -0.069732551550331076;
constexpr double kGoldenGlobal = -0.05031566730141955;
constexpr double kGoldenMs = 0.95899808778047679;
constexpr double kGoldenG = 0.92631969997674823;

TEST_CASE("golden values") {
    const auto [x16, y16] = oracle::random_pair(16, 16, 2024);
    CHECK(ssim_windowed(x16, y16).score == Approx(kGoldenWindowed).epsilon(1e-12));
    CHECK(ssim_global(x16, y16).score == Approx(kGoldenGlobal).epsilon(1e-12));

    const Image base = synthetic_natural(64, 64, 5);
    const Image noisy = inject_noise(base, {NoiseDistribution::gaussian, 0.1, Band::highest, 0.35, 5, 1.0});
    const auto [mx, my] = normalize_joint(base, noisy);
    CHECK(ms_ssim(mx, my, {}, 3).score == Approx(kGoldenMs).epsilon(1e-12));
    CHECK(ms_ssim(mx, my, {}, 3).score ==
          Approx(oracle::ms_ssim(oracle::to_grid(mx), oracle::to_grid(my), 3)).epsilon(1e-10));

    const auto [gx, gy] = normalize_joint(base, box_blur(base));
    CHECK(g_ssim(gx, gy).score == Approx(kGoldenG).epsilon(1e-12));
    CHECK(g_ssim(gx, gy).score == Approx(oracle::g_ssim(oracle::to_grid(gx), oracle::to_grid(gy))).epsilon(1e-10));
}
