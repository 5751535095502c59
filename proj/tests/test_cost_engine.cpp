#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stegcost/cost.hpp"
#include "stegcost/errors.hpp"
#include "stegcost/synth.hpp"
#include "support.hpp"

using namespace stegcost;

namespace {

// Independent 2D box mean with mirror padding, one pass, no separation.
SensitivityMap brute_box_mean(const SensitivityMap& map, int k) {
    int half = k / 2;
    SensitivityMap out(map.width, map.height);
    for (int i = 0; i < map.height; ++i) {
        for (int j = 0; j < map.width; ++j) {
            double sum = 0.0;
            for (int dr = -half; dr <= half; ++dr) {
                for (int dc = -half; dc <= half; ++dc) {
                    sum += map.at(mirror_index(i + dr, map.height),
                                  mirror_index(j + dc, map.width));
                }
            }
            out.set(i, j, sum / (static_cast<double>(k) * k));
        }
    }
    return out;
}

std::vector<std::size_t> cost_ordering(const CostMap& map) {
    std::vector<std::size_t> order(map.pixel_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return map.costs()[a] < map.costs()[b];
    });
    return order;
}

}  // namespace

TEST_CASE("stencil recovers the second derivative of a quadratic in one pixel") {
    GrayImage img(16, 16, 100);
    QuadraticTestOracle oracle(7, 9, 1.0, 0.0, 0.0);
    SensitivityMap d2 = second_derivative_map(oracle, img);
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            if (i == 7 && j == 9) {
                CHECK(std::abs(d2.at(i, j) - 2.0) <= 1e-9);
            } else {
                CHECK(std::abs(d2.at(i, j)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("stencil vanishes for a linear oracle") {
    GrayImage img(8, 8, 77);
    QuadraticTestOracle oracle(2, 3, 0.0, 1.0, 4.0);
    SensitivityMap d2 = second_derivative_map(oracle, img);
    for (double v : d2.values) CHECK(std::abs(v) <= 1e-9);
}

TEST_CASE("stencil is exact for single-pixel polynomials up to degree five") {
    GrayImage img(8, 8, 100);
    testsupport::PolynomialPixelOracle oracle(4, 4, {3.0, -2.0, 1.5, 0.25, -0.01, 0.002});
    SensitivityMap d2 = second_derivative_map(oracle, img);
    double expected = oracle.second_derivative(100.0);
    CHECK(std::abs(d2.at(4, 4) - expected) <= 1e-6 * std::abs(expected));
}

TEST_CASE("stencil treats all deep-interior pixels of a flat cover alike") {
    GrayImage flat = synth_cover("flat:128", 16, 16, 0);
    FilterLogitOracle oracle;
    SensitivityMap d2 = second_derivative_map(oracle, flat);
    double reference = d2.at(4, 4);
    for (int i = 4; i <= 11; ++i) {
        for (int j = 4; j <= 11; ++j) {
            CHECK(std::abs(d2.at(i, j) - reference) <= 1e-15);
        }
    }
}

TEST_CASE("stencil output does not depend on the worker count") {
    GrayImage img = synth_cover("noise:3", 24, 24, 5);
    FilterLogitOracle oracle;
    SensitivityMap one = second_derivative_map(oracle, img, 1);
    SensitivityMap four = second_derivative_map(oracle, img, 4);
    CHECK(one.values == four.values);
}

TEST_CASE("clamp_negative zeroes negative entries and is idempotent") {
    SensitivityMap map(3, 1);
    map.values = {-1.0, 0.0, 2.0};
    SensitivityMap once = clamp_negative(map);
    CHECK(once.values == std::vector<double>{0.0, 0.0, 2.0});
    CHECK(clamp_negative(once).values == once.values);

    SensitivityMap negative(4, 2, -3.5);
    for (double v : clamp_negative(negative).values) CHECK(v == 0.0);
}

TEST_CASE("scale_linear maps onto the unit interval") {
    SensitivityMap map(3, 1);
    map.values = {0.0, 2.0, 4.0};
    CHECK(scale_linear(map).values == std::vector<double>{0.0, 0.5, 1.0});

    SensitivityMap constant(5, 5, 3.25);
    for (double v : scale_linear(constant).values) CHECK(v == 0.5);

    SensitivityMap unit(2, 1);
    unit.values = {0.0, 1.0};
    CHECK(scale_linear(unit).values == std::vector<double>{0.0, 1.0});

    SensitivityMap bad(2, 1);
    bad.values = {-0.5, 1.0};
    CHECK_THROWS_AS(scale_linear(bad), std::invalid_argument);
}

TEST_CASE("average_filter identity, impulse and constant cases") {
    SensitivityMap impulse(5, 5, 0.0);
    impulse.set(2, 2, 9.0);
    CHECK(average_filter(impulse, 1).values == impulse.values);

    SensitivityMap smoothed = average_filter(impulse, 3);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            double expected = (std::abs(i - 2) <= 1 && std::abs(j - 2) <= 1) ? 1.0 : 0.0;
            CHECK(smoothed.at(i, j) == expected);
        }
    }

    SensitivityMap constant(7, 6, 2.5);
    for (int k : {3, 5, 15}) {
        for (double v : average_filter(constant, k).values) {
            CHECK(v == doctest::Approx(2.5).epsilon(1e-15));
        }
    }

    CHECK_THROWS_AS(average_filter(impulse, 2), std::invalid_argument);
    CHECK_THROWS_AS(average_filter(impulse, 0), std::invalid_argument);
    CHECK_THROWS_AS(average_filter(impulse, -3), std::invalid_argument);
}

TEST_CASE("average_filter agrees with a direct 2D convolution") {
    SplitMix64 rng(31);
    for (int k : {3, 5, 9}) {
        SensitivityMap map(11, 7);
        for (double& v : map.values) v = rng.next_unit() * 10.0 - 2.0;
        SensitivityMap fast = average_filter(map, k);
        SensitivityMap slow = brute_box_mean(map, k);
        for (std::size_t i = 0; i < fast.values.size(); ++i) {
            CHECK(fast.values[i] == doctest::Approx(slow.values[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("average_filter is monotone") {
    SplitMix64 rng(77);
    SensitivityMap lo(9, 9), hi(9, 9);
    for (std::size_t i = 0; i < lo.values.size(); ++i) {
        lo.values[i] = rng.next_unit();
        hi.values[i] = lo.values[i] + rng.next_unit();
    }
    SensitivityMap flo = average_filter(lo, 5);
    SensitivityMap fhi = average_filter(hi, 5);
    for (std::size_t i = 0; i < flo.values.size(); ++i) {
        CHECK(flo.values[i] <= fhi.values[i] + 1e-15);
    }
}

TEST_CASE("build_cost_map marks saturated pixels wet") {
    GrayImage white = synth_cover("flat:255", 8, 8, 0);
    FilterLogitOracle oracle;
    CostMap map = build_cost_map(oracle, white, 3);
    CHECK(map.wet_count() == 64);
    for (double c : map.costs()) CHECK(c == kWetCost);
}

TEST_CASE("build_cost_map floors non-wet costs and keeps dimensions") {
    GrayImage flat = synth_cover("flat:128", 16, 16, 0);
    FilterLogitOracle oracle;
    CostMap map = build_cost_map(oracle, flat, 1);
    CHECK(map.width() == 16);
    CHECK(map.height() == 16);
    CHECK(map.wet_count() == 0);
    for (double c : map.costs()) CHECK(c >= kCostFloor);
    double reference = map.cost(6, 6);
    for (int i = 4; i <= 11; ++i) {
        for (int j = 4; j <= 11; ++j) CHECK(map.cost(i, j) == doctest::Approx(reference));
    }
}

TEST_CASE("build_cost_map equals its stage-by-stage composition") {
    GrayImage img = synth_cover("two-region", 24, 24, 3);
    FilterLogitOracle oracle;
    int k = 5;
    CostMap combined = build_cost_map(oracle, img, k);

    SensitivityMap staged =
        average_filter(scale_linear(clamp_negative(second_derivative_map(oracle, img))), k);
    for (int i = 0; i < img.height(); ++i) {
        for (int j = 0; j < img.width(); ++j) {
            if (img(i, j) == 0 || img(i, j) == 255) {
                CHECK(combined.is_wet(i, j));
                CHECK(combined.cost(i, j) == kWetCost);
            } else {
                CHECK_FALSE(combined.is_wet(i, j));
                CHECK(combined.cost(i, j) == std::max(staged.at(i, j), kCostFloor));
            }
        }
    }
}

TEST_CASE("default smoothing size is 13") { CHECK(kDefaultFilterSize == 13); }

TEST_CASE("hill cost of a flat image is uniform and maximal") {
    GrayImage flat = synth_cover("flat:128", 16, 16, 0);
    CostMap map = hill_cost(flat);
    CHECK(map.wet_count() == 0);
    for (double c : map.costs()) CHECK(c == 1.0 / kCostFloor);
}

TEST_CASE("hill cost prefers the noisy half of a two-region cover") {
    GrayImage img = synth_cover("two-region", 64, 64, 7);
    CostMap map = hill_cost(img);
    double smooth_sum = 0.0, noisy_sum = 0.0;
    std::size_t smooth_n = 0, noisy_n = 0;
    for (int i = 0; i < 64; ++i) {
        for (int j = 0; j < 64; ++j) {
            if (map.is_wet(i, j)) continue;
            if (j < 32) {
                smooth_sum += map.cost(i, j);
                ++smooth_n;
            } else {
                noisy_sum += map.cost(i, j);
                ++noisy_n;
            }
        }
    }
    REQUIRE(smooth_n > 0);
    REQUIRE(noisy_n > 0);
    CHECK(noisy_sum / static_cast<double>(noisy_n) < smooth_sum / static_cast<double>(smooth_n));
}

TEST_CASE("uniform residual rescaling preserves the hill cost ordering") {
    // hill_cost is 1/max(eps, smoothed residual); scaling the image contrast
    // scales residuals and must not reorder pixels. Compare the argsort of
    // costs for an image and a contrast-doubled version of it.
    GrayImage img(16, 16);
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            img.set(i, j, static_cast<std::uint8_t>(100 + ((i * 7 + j * 13) % 20)));
        }
    }
    GrayImage doubled(16, 16);
    for (int i = 0; i < 16; ++i) {
        for (int j = 0; j < 16; ++j) {
            doubled.set(i, j, static_cast<std::uint8_t>(60 + 2 * (img(i, j) - 100)));
        }
    }
    CHECK(cost_ordering(hill_cost(img)) == cost_ordering(hill_cost(doubled)));
}

TEST_CASE("additive distortion sums cost times change magnitude") {
    GrayImage x = testsupport::random_image(8, 8, 2);
    CostMap rho(8, 8, 0.0);

    GrayImage same = x;
    CHECK(additive_distortion(x, same, rho) == 0.0);

    GrayImage one_change = x;
    one_change.set(3, 3, clamp_intensity(static_cast<int>(x(3, 3)) + 1));
    rho.set_cost(3, 3, 0.7);
    if (one_change(3, 3) == x(3, 3)) one_change.set(3, 3, x(3, 3) - 1);
    CHECK(additive_distortion(x, one_change, rho) == doctest::Approx(0.7));

    GrayImage two_changes = one_change;
    two_changes.set(5, 6, clamp_intensity(static_cast<int>(x(5, 6)) - 1));
    if (two_changes(5, 6) == x(5, 6)) two_changes.set(5, 6, x(5, 6) + 1);
    rho.set_cost(3, 3, 0.2);
    rho.set_cost(5, 6, 0.5);
    CHECK(additive_distortion(x, two_changes, rho) == doctest::Approx(0.7));
}

TEST_CASE("additive distortion rejects bad inputs") {
    GrayImage x(8, 8, 100);
    GrayImage y(8, 8, 102);
    CostMap rho(8, 8, 1.0);
    CHECK_THROWS_AS(additive_distortion(x, y, rho), NumericError);
    CostMap wrong(9, 8, 1.0);
    CHECK_THROWS_AS(additive_distortion(x, x, wrong), std::invalid_argument);
}
