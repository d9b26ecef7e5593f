#include "intensim/error.hpp"
#include "intensim/image.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace intensim;

TEST_CASE("image construction validates shape and values") {
    CHECK_THROWS_AS(Image(2, 2, {0.0, 1.0, 0.5}), DimensionMismatch);
    CHECK_THROWS_AS(Image(1, 1, {0.5}), InvalidArgument);
    CHECK_THROWS_AS(Image(2, 1, {0.0, std::nan("")}), InvalidArgument);
    CHECK_THROWS_AS(Image(2, 1, {0.0, INFINITY}), InvalidArgument);

    const Image img(3, 2, {0, 1, 2, 3, 4, 5});
    CHECK(img.width() == 3);
    CHECK(img.height() == 2);
    CHECK(img(1, 0) == 3.0);
    CHECK(img(0, 2) == 2.0);
    CHECK(img.sum() == 15.0);
    CHECK(img.min() == 0.0);
    CHECK(img.max() == 5.0);
    CHECK_FALSE(img.is_unit_range());
}

TEST_CASE("band names parse") {
    CHECK(parse_band("highest") == Band::highest);
    CHECK(parse_band("low") == Band::lowest);
    CHECK(to_string(Band::lowest) == "lowest");
    CHECK_THROWS_AS(parse_band("middle"), InvalidArgument);
}

TEST_CASE("normalize_joint uses the joint range") {
    const Image x(2, 1, {2.0, 4.0});
    const Image y(2, 1, {3.0, 6.0});
    const auto [nx, ny] = normalize_joint(x, y);
    CHECK(nx[0] == doctest::Approx(0.0));
    CHECK(nx[1] == doctest::Approx(0.5));
    CHECK(ny[0] == doctest::Approx(0.25));
    CHECK(ny[1] == doctest::Approx(1.0));
}

TEST_CASE("normalize_joint is idempotent on random pairs") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto [nx, ny] = oracle::random_pair(7, 5, s);
        const auto [mx, my] = normalize_joint(nx, ny);
        for (std::size_t i = 0; i < nx.size(); ++i) {
            CHECK(mx[i] == doctest::Approx(nx[i]).epsilon(1e-12));
            CHECK(my[i] == doctest::Approx(ny[i]).epsilon(1e-12));
        }
        CHECK(std::min(nx.min(), ny.min()) == 0.0);
        CHECK(std::max(nx.max(), ny.max()) == 1.0);
    }
}

TEST_CASE("normalize_joint rejects degenerate and mismatched pairs") {
    CHECK_THROWS_AS(normalize_joint(Image::filled(2, 2, 0.3), Image::filled(2, 2, 0.3)), DegenerateInput);
    CHECK_THROWS_AS(normalize_joint(Image::filled(2, 2, 0.3), Image::filled(2, 1, 0.3)), DimensionMismatch);
}

TEST_CASE("intensity_mask breaks ties by row-major index") {
    const Image x(2, 2, {0.3, 0.3, 0.3, 0.7});
    const auto high = intensity_mask(x, Band::highest, 0.5);
    CHECK(high.count() == 2);
    CHECK(high.indices() == std::vector<std::size_t>{0, 3});
    const auto low = intensity_mask(x, Band::lowest, 0.5);
    CHECK(low.indices() == std::vector<std::size_t>{0, 1});
}

TEST_CASE("intensity_mask rounds half up and rejects bad fractions") {
    const Image x(2, 2, {0.1, 0.2, 0.3, 0.4});
    CHECK(intensity_mask(x, Band::highest, 0.375).count() == 2);  // 1.5 rounds to 2
    CHECK(intensity_mask(x, Band::highest, 0.35).count() == 1);   // 1.4 rounds to 1
    CHECK_THROWS_AS(intensity_mask(x, Band::highest, 0.0), InvalidArgument);
    CHECK_THROWS_AS(intensity_mask(x, Band::highest, 1.0), InvalidArgument);
}

TEST_CASE("intensity_mask selects the extreme pixels") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Image x = oracle::random_image(9, 7, s);
        const auto m = intensity_mask(x, Band::highest, 0.35);
        double min_in = 2, max_out = -1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (m.selected[i]) min_in = std::min(min_in, x[i]);
            else max_out = std::max(max_out, x[i]);
        }
        CHECK(min_in >= max_out);
        CHECK(m.count() == 22);  // round(0.35 * 63) = 22
    }
}

TEST_CASE("crop extracts a sub-rectangle") {
    const Image x(3, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8});
    const Image c = crop(x, {1, 1, 2, 2});
    CHECK(c == Image(2, 2, {4, 5, 7, 8}));
    CHECK_THROWS_AS(crop(x, {2, 0, 2, 1}), InvalidArgument);
}
