#pragma once

#include <vector>

#include "stegcost/image.hpp"
#include "stegcost/oracle.hpp"

namespace stegcost {

/// Cost assigned to forbidden (wet) pixels. High enough that both probability
/// rules drive the change probability to zero; the wet mask additionally
/// guarantees no change regardless of arithmetic.
inline constexpr double kWetCost = 1e10;

/// Floor applied to non-wet costs so no change is ever free.
inline constexpr double kCostFloor = 1e-6;

/// Smoothing filter size with the best reported security; the default for
/// the proposed cost.
inline constexpr int kDefaultFilterSize = 13;

/// Per-pixel real-valued field (second-derivative estimates and the stages
/// derived from them). Values may be negative before clamping.
struct SensitivityMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    SensitivityMap() = default;
    SensitivityMap(int w, int h, double fill = 0.0);

    double at(int row, int col) const noexcept {
        return values[static_cast<std::size_t>(row) * width + col];
    }
    void set(int row, int col, double v) noexcept {
        values[static_cast<std::size_t>(row) * width + col] = v;
    }
};

/// Per-pixel nonnegative embedding costs with a wet mask. Wet pixels always
/// carry kWetCost.
class CostMap {
public:
    CostMap(int width, int height, double initial = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return costs_.size(); }

    double cost(int row, int col) const noexcept {
        return costs_[static_cast<std::size_t>(row) * width_ + col];
    }
    bool is_wet(int row, int col) const noexcept {
        return wet_[static_cast<std::size_t>(row) * width_ + col] != 0;
    }

    void set_cost(int row, int col, double value);
    void set_wet(int row, int col) noexcept;

    std::span<const double> costs() const& noexcept { return costs_; }
    std::span<const double> costs() const&& = delete;  // would dangle
    std::span<const std::uint8_t> wet_mask() const& noexcept { return wet_; }
    std::span<const std::uint8_t> wet_mask() const&& = delete;
    std::size_t wet_count() const noexcept;

private:
    int width_;
    int height_;
    std::vector<double> costs_;
    std::vector<std::uint8_t> wet_;
};

/// Estimate of the oracle's second derivative with respect to each pixel:
/// five-point central stencil over pixel values, altered values clamped into
/// [0, 255], the base score evaluated once and shared across all pixels.
/// Workers may split rows; output is schedule-independent.
SensitivityMap second_derivative_map(const ModelOracle& oracle, const GrayImage& img,
                                     int threads = 1);

/// Elementwise max(value, 0).
SensitivityMap clamp_negative(SensitivityMap raw);

/// Min-max rescaling onto [0, 1]; a constant map becomes all 0.5.
/// Input values must be nonnegative.
SensitivityMap scale_linear(SensitivityMap raw);

/// k x k mean filter with mirror padding; k must be odd and positive.
/// k = 1 returns the input unchanged.
SensitivityMap average_filter(const SensitivityMap& map, int k);

/// Full proposed-cost pipeline: stencil, clamp, scale, smooth, then mark
/// saturated pixels (0 and 255) wet and floor the remaining costs at
/// kCostFloor.
CostMap build_cost_map(const ModelOracle& oracle, const GrayImage& img,
                       int k = kDefaultFilterSize, int threads = 1);

/// Baseline cost: reciprocal of the doubly averaged magnitude of the 3x3
/// KerBohme high-pass residual, 1 / max(kCostFloor, avg15(avg3(|img * KB3|))),
/// mirror padding throughout; saturated pixels wet.
CostMap hill_cost(const GrayImage& img);

/// Additive distortion sum(rho_ij * |x_ij - y_ij|). Requires matching
/// dimensions and |x - y| <= 1 everywhere (ternary embedding).
double additive_distortion(const GrayImage& x, const GrayImage& y, const CostMap& rho);

}  // namespace stegcost
