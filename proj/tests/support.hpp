#pragma once

// Shared fixtures and independent reference implementations used as oracles
// by the unit and acceptance tests. Everything here recomputes results from
// first principles, separate from the library code paths under test.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "stegcost/cost.hpp"
#include "stegcost/image.hpp"
#include "stegcost/oracle.hpp"
#include "stegcost/rng.hpp"

namespace testsupport {

using stegcost::GrayImage;

/// Test oracle depending on one pixel: score = sum_k coeffs[k] * v^k.
class PolynomialPixelOracle final : public stegcost::ModelOracle {
public:
    PolynomialPixelOracle(int row, int col, std::vector<double> coeffs)
        : row_(row), col_(col), coeffs_(std::move(coeffs)) {}

    double score(const GrayImage& img) const override { return eval(img(row_, col_)); }

    std::string id() const override { return "polynomial-test"; }

    double eval(double v) const {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * v + coeffs_[k];
        return acc;
    }

    // Analytic second derivative at v.
    double second_derivative(double v) const {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 2;) {
            acc = acc * v + coeffs_[k] * static_cast<double>(k) * static_cast<double>(k - 1);
        }
        return acc;
    }

private:
    int row_, col_;
    std::vector<double> coeffs_;
};

inline GrayImage random_image(int width, int height, std::uint64_t seed) {
    GrayImage img(width, height);
    stegcost::SplitMix64 rng(seed);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            img.set(i, j, static_cast<std::uint8_t>(rng.next_below(256)));
        }
    }
    return img;
}

/// Random non-wet cost map with costs in [lo, hi].
inline stegcost::CostMap random_cost_map(int width, int height, std::uint64_t seed,
                                         double lo = 0.05, double hi = 3.0) {
    stegcost::CostMap map(width, height);
    stegcost::SplitMix64 rng(seed);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            map.set_cost(i, j, lo + (hi - lo) * rng.next_unit());
        }
    }
    return map;
}

/// Sample variance over a pixel region [row0, row1) x [col0, col1).
inline double region_variance(const GrayImage& img, int row0, int row1, int col0, int col1) {
    double n = 0.0, mean = 0.0, m2 = 0.0;
    for (int i = row0; i < row1; ++i) {
        for (int j = col0; j < col1; ++j) {
            n += 1.0;
            double d = img(i, j) - mean;
            mean += d / n;
            m2 += d * (img(i, j) - mean);
        }
    }
    return n > 1.0 ? m2 / (n - 1.0) : 0.0;
}

/// Entropy of one symmetric ternary pixel, reimplemented for tests.
inline double href(double q) {
    double bits = 0.0;
    if (q > 0.0) bits -= 2.0 * q * std::log2(q);
    double p0 = 1.0 - 2.0 * q;
    if (p0 > 0.0) bits -= p0 * std::log2(p0);
    return bits;
}

/// Inverse of href on [0, 1/3] by bisection; href is increasing there.
inline double href_inverse(double bits) {
    if (bits <= 0.0) return 0.0;
    double lo = 0.0, hi = 1.0 / 3.0;
    if (bits >= href(hi)) return hi;
    for (int step = 0; step < 200; ++step) {
        double mid = 0.5 * (lo + hi);
        (href(mid) < bits ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace testsupport
