#include <cmath>
#include <limits>

#include "doctest.h"
#include "goldgi/metrics.hpp"

using namespace goldgi;

namespace {

ImageGrid grid_1x2(double a, double b) {
    ImageGrid g = make_grid(1, 2);
    g.values = {a, b};
    return g;
}

}  // namespace

TEST_CASE("mean squared error") {
    const ImageGrid a = grid_1x2(1.0, 0.0);
    const ImageGrid b = grid_1x2(0.5, 0.5);
    CHECK(mse(a, b) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mse(b, a) == mse(a, b));
    CHECK(mse(a, a) == 0.0);
    CHECK_THROWS_AS(mse(a, make_grid(2, 1, 0.0)), ValidationError);
}

TEST_CASE("peak signal-to-noise ratio") {
    const ImageGrid a = grid_1x2(1.0, 0.0);
    const ImageGrid b = grid_1x2(0.5, 0.5);
    CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(1.0 / 0.25)).epsilon(1e-12));
    CHECK(psnr(a, b, 2.0) == doctest::Approx(10.0 * std::log10(4.0 / 0.25)).epsilon(1e-12));

    const double perfect = psnr(a, a);
    CHECK(std::isinf(perfect));
    CHECK(perfect > 0);
    CHECK(psnr_is_infinite(perfect));
    CHECK_FALSE(psnr_is_infinite(300.0));

    CHECK_THROWS_AS(psnr(a, b, 0.0), ValidationError);
    CHECK_THROWS_AS(psnr(a, b, -1.0), ValidationError);
}

TEST_CASE("quality report bundles both metrics") {
    const ImageGrid a = grid_1x2(1.0, 0.0);
    const ImageGrid b = grid_1x2(0.5, 0.5);
    const QualityReport rep = quality_report(a, b, 1.0);
    CHECK(rep.mse == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(rep.psnr == doctest::Approx(psnr(a, b)).epsilon(1e-15));
    CHECK(rep.max_val == 1.0);
    CHECK(rep.pixel_count == 2);

    const QualityReport same = quality_report(a, a);
    CHECK(same.mse == 0.0);
    CHECK(psnr_is_infinite(same.psnr));
}

TEST_CASE("infinite psnr renders as the literal inf") {
    CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}
