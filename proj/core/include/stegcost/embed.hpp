#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "stegcost/cost.hpp"
#include "stegcost/image.hpp"

namespace stegcost {

/// log2(3): entropy of one maximally random ternary pixel, and therefore the
/// largest relative payload.
inline constexpr double kLog2Three = 1.5849625007211562;

/// How change probabilities are derived from costs.
enum class Rule {
    gibbs,   // exponential law, the exact minimizer of expected distortion
    capped,  // capped-linear law max(1/3 - lambda * rho, 0)
};

std::string_view to_string(Rule rule) noexcept;
Rule rule_from_string(std::string_view name);

/// Symmetric ternary change probabilities: pChange = p(+1) = p(-1), in
/// [0, 1/3]; wet pixels carry exactly 0.
class ChangeProbabilities {
public:
    ChangeProbabilities(int width, int height, Rule rule);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    Rule rule() const noexcept { return rule_; }
    std::size_t pixel_count() const noexcept { return p_change_.size(); }

    double at(int row, int col) const noexcept {
        return p_change_[static_cast<std::size_t>(row) * width_ + col];
    }
    void set(int row, int col, double p);

    std::span<const double> values() const& noexcept { return p_change_; }
    std::span<const double> values() const&& = delete;  // would dangle

    bool operator==(const ChangeProbabilities&) const = default;

private:
    int width_;
    int height_;
    std::vector<double> p_change_;
    Rule rule_;
};

/// Per-pixel change matrix with entries in {-1, 0, +1}.
class EmbeddingPattern {
public:
    EmbeddingPattern(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return s_.size(); }

    int at(int row, int col) const noexcept {
        return s_[static_cast<std::size_t>(row) * width_ + col];
    }
    void set(int row, int col, int s);

    std::span<const std::int8_t> values() const& noexcept { return s_; }
    std::span<const std::int8_t> values() const&& = delete;  // would dangle
    std::size_t change_count() const noexcept;

    bool operator==(const EmbeddingPattern&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::int8_t> s_;
};

/// Message size against a given raster. alpha is in bits per pixel.
struct PayloadSpec {
    double alpha = 0.0;
    double message_bits = 0.0;

    /// m = round(alpha * width * height). Throws NumericError when alpha is
    /// outside [0, log2(3)].
    static PayloadSpec from_alpha(double alpha, int width, int height);

    /// Direct bit count, for callers that already know m.
    static PayloadSpec from_bits(double bits, int width, int height);
};

struct LambdaSolution {
    double lambda = 0.0;
    double entropy_bits = 0.0;  // achieved entropy at the returned lambda
    int iterations = 0;         // entropy evaluations spent
};

/// Exponential rule: pChange = e^(-lambda * rho) / (1 + 2 e^(-lambda * rho)).
ChangeProbabilities gibbs_probs(const CostMap& rho, double lambda);

/// Capped-linear rule: pChange = max(1/3 - lambda * rho, 0).
ChangeProbabilities capped_probs(const CostMap& rho, double lambda);

ChangeProbabilities change_probs(const CostMap& rho, double lambda, Rule rule);

/// Entropy of the sampled pattern in bits: sum over pixels of
/// h(q) = -2q log2(q) - (1 - 2q) log2(1 - 2q), accumulated by row-major
/// pairwise summation so the result is independent of worker scheduling.
double pattern_entropy(const ChangeProbabilities& p);

/// Entropy of one symmetric ternary pixel, in bits.
double ternary_entropy_bits(double p_change) noexcept;

/// Finds lambda >= 0 with |pattern_entropy - m| <= max(1e-3 m, 1e-6) bits.
/// Entropy is nonincreasing in lambda for both rules, so the solver brackets
/// by doubling from 1 (capped at 2^64) and then bisects at most 200 times.
/// m = 0 and m = max entropy are handled as explicit endpoints. Throws
/// NumericError for infeasible payloads (naming the maximum feasible one)
/// and on bracket failure.
LambdaSolution solve_lambda(const CostMap& rho, const PayloadSpec& payload, Rule rule);

/// Samples changes independently per pixel: +1 with pChange, -1 with pChange.
/// Driven by the kPixelRngId generator keyed on (seed, row, col), so the
/// pattern never depends on worker count or schedule. Wet pixels stay 0.
EmbeddingPattern sample_pattern(const ChangeProbabilities& p, std::uint64_t seed,
                                int threads = 1);

/// y = clamp(x + s) into [0, 255].
GrayImage apply_pattern(const GrayImage& x, const EmbeddingPattern& s);

/// Expected additive distortion sum(2 pChange_ij rho_ij).
double expected_distortion(const ChangeProbabilities& p, const CostMap& rho);

}  // namespace stegcost
