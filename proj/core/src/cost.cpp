#include "stegcost/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "stegcost/errors.hpp"
#include "stegcost/parallel.hpp"

namespace stegcost {

SensitivityMap::SensitivityMap(int w, int h, double fill) : width(w), height(h) {
    if (w < 1 || h < 1) throw std::invalid_argument("sensitivity map dimensions must be positive");
    values.assign(static_cast<std::size_t>(w) * h, fill);
}

CostMap::CostMap(int width, int height, double initial) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw std::invalid_argument("cost map dimensions must be positive");
    if (!(initial >= 0.0) || !std::isfinite(initial)) {
        throw std::invalid_argument("costs must be finite and nonnegative");
    }
    costs_.assign(static_cast<std::size_t>(width) * height, initial);
    wet_.assign(costs_.size(), 0);
}

void CostMap::set_cost(int row, int col, double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("costs must be finite and nonnegative");
    }
    std::size_t idx = static_cast<std::size_t>(row) * width_ + col;
    costs_[idx] = value;
    wet_[idx] = 0;
}

void CostMap::set_wet(int row, int col) noexcept {
    std::size_t idx = static_cast<std::size_t>(row) * width_ + col;
    costs_[idx] = kWetCost;
    wet_[idx] = 1;
}

std::size_t CostMap::wet_count() const noexcept {
    std::size_t n = 0;
    for (std::uint8_t w : wet_) n += w;
    return n;
}

SensitivityMap second_derivative_map(const ModelOracle& oracle, const GrayImage& img,
                                     int threads) {
    SensitivityMap out(img.width(), img.height());
    auto scorer = oracle.prepare(img);
    double base = scorer->base_score();

    parallel_chunks(img.height(), threads, [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i) {
            for (int j = 0; j < img.width(); ++j) {
                int v = img(i, j);
                auto eval = [&](int d) {
                    std::uint8_t altered = clamp_intensity(v + d);
                    return scorer->score_with_pixel(i, j, altered);
                };
                double m2 = eval(-2), m1 = eval(-1), p1 = eval(+1), p2 = eval(+2);
                // Differences against the shared base score cancel exactly on
                // pixels the oracle ignores.
                double value = -(m2 - base) / 12.0 + 4.0 * (m1 - base) / 3.0 +
                               4.0 * (p1 - base) / 3.0 - (p2 - base) / 12.0;
                out.set(i, j, value);
            }
        }
    });
    return out;
}

SensitivityMap clamp_negative(SensitivityMap raw) {
    for (double& v : raw.values) v = std::max(v, 0.0);
    return raw;
}

SensitivityMap scale_linear(SensitivityMap raw) {
    auto [lo_it, hi_it] = std::minmax_element(raw.values.begin(), raw.values.end());
    double lo = *lo_it, hi = *hi_it;
    if (lo < 0.0) throw std::invalid_argument("scale_linear expects nonnegative values");
    if (hi > lo) {
        double span = hi - lo;
        for (double& v : raw.values) v = (v - lo) / span;
    } else {
        for (double& v : raw.values) v = 0.5;
    }
    return raw;
}

SensitivityMap average_filter(const SensitivityMap& map, int k) {
    if (k < 1 || k % 2 == 0) {
        throw std::invalid_argument("average filter size must be odd and positive, got " +
                                    std::to_string(k));
    }
    if (k == 1) return map;

    int half = k / 2;
    int w = map.width, h = map.height;
    // The box mean factorizes into a column pass then a row pass because the
    // mirror reflection applies per axis.
    SensitivityMap cols(w, h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double sum = 0.0;
            for (int d = -half; d <= half; ++d) {
                sum += map.at(mirror_index(i + d, h), j);
            }
            cols.set(i, j, sum / k);
        }
    }
    SensitivityMap out(w, h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double sum = 0.0;
            for (int d = -half; d <= half; ++d) {
                sum += cols.at(i, mirror_index(j + d, w));
            }
            out.set(i, j, sum / k);
        }
    }
    return out;
}

namespace {

CostMap finalize_costs(const SensitivityMap& smoothed, const GrayImage& img) {
    CostMap out(img.width(), img.height());
    for (int i = 0; i < img.height(); ++i) {
        for (int j = 0; j < img.width(); ++j) {
            std::uint8_t p = img(i, j);
            if (p == 0 || p == 255) {
                out.set_wet(i, j);
            } else {
                out.set_cost(i, j, std::max(smoothed.at(i, j), kCostFloor));
            }
        }
    }
    return out;
}

}  // namespace

CostMap build_cost_map(const ModelOracle& oracle, const GrayImage& img, int k, int threads) {
    SensitivityMap smoothed =
        average_filter(scale_linear(clamp_negative(second_derivative_map(oracle, img, threads))), k);
    return finalize_costs(smoothed, img);
}

CostMap hill_cost(const GrayImage& img) {
    // 3x3 KerBohme high-pass kernel, scaled by 1/4.
    constexpr double kb3[9] = {-0.25, 0.5, -0.25, 0.5, -1.0, 0.5, -0.25, 0.5, -0.25};

    int w = img.width(), h = img.height();
    SensitivityMap residual(w, h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int u = 0; u < 3; ++u) {
                for (int v = 0; v < 3; ++v) {
                    acc += kb3[u * 3 + v] *
                           img(mirror_index(i + u - 1, h), mirror_index(j + v - 1, w));
                }
            }
            residual.set(i, j, std::abs(acc));
        }
    }

    SensitivityMap smoothed = average_filter(average_filter(residual, 3), 15);

    CostMap out(w, h);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            std::uint8_t p = img(i, j);
            if (p == 0 || p == 255) {
                out.set_wet(i, j);
            } else {
                out.set_cost(i, j, 1.0 / std::max(smoothed.at(i, j), kCostFloor));
            }
        }
    }
    return out;
}

double additive_distortion(const GrayImage& x, const GrayImage& y, const CostMap& rho) {
    if (x.width() != y.width() || x.height() != y.height() || x.width() != rho.width() ||
        x.height() != rho.height()) {
        throw std::invalid_argument("additive_distortion: dimension mismatch");
    }
    double total = 0.0;
    for (int i = 0; i < x.height(); ++i) {
        for (int j = 0; j < x.width(); ++j) {
            int diff = std::abs(static_cast<int>(x(i, j)) - static_cast<int>(y(i, j)));
            if (diff > 1) {
                throw NumericError("additive_distortion: |x - y| > 1 at (" + std::to_string(i) +
                                   ", " + std::to_string(j) + ")");
            }
            total += rho.cost(i, j) * diff;
        }
    }
    return total;
}

}  // namespace stegcost
