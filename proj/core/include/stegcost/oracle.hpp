#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stegcost/image.hpp"

namespace stegcost {

/// Numerically stable logistic function; strictly inside (0, 1) for any
/// finite z that does not underflow exp.
double logistic(double z) noexcept;

/// Histogram features of mirror-padded first-order differences, horizontal
/// block then vertical block, each value truncated to [-T, T] and each
/// histogram normalized by the pixel count (so the full vector sums to 2).
/// Length is 2 * (2T + 1).
std::vector<double> residual_histogram_features(const GrayImage& img, int truncation);

/// Per-image incremental rescorer obtained from ModelOracle::prepare.
/// Calls are pure and safe to issue concurrently from many workers.
class PixelScorer {
public:
    virtual ~PixelScorer() = default;

    /// Score of the unmodified image, computed once at preparation.
    virtual double base_score() const noexcept = 0;

    /// Score of the prepared image with pixel (row, col) set to value.
    /// For the k x k-local reference oracles this costs O(k^2), not
    /// O(width * height).
    virtual double score_with_pixel(int row, int col, std::uint8_t value) const = 0;
};

/// Steganalyzer-oracle contract: a side-effect-free scorer of images.
/// Detector-style oracles return the estimated probability that the image
/// carries a hidden message; test oracles may return any finite real.
class ModelOracle {
public:
    virtual ~ModelOracle() = default;

    virtual double score(const GrayImage& img) const = 0;

    /// Builds the per-image state for fast single-pixel rescoring. The
    /// default wraps full rescoring; local oracles override it with an
    /// incremental implementation.
    virtual std::unique_ptr<PixelScorer> prepare(const GrayImage& img) const;

    /// Score of img with one pixel replaced, without mutating img.
    /// Convenience wrapper over prepare(); throws std::out_of_range for bad
    /// coordinates and std::invalid_argument for values outside [0, 255].
    double score_with_pixel(const GrayImage& img, int row, int col, int value) const;

    /// Stable identifier used in reports and serialized headers.
    virtual std::string id() const = 0;
};

/// Analytic reference oracle: logistic(gain * meanAbsResidual + bias) where
/// the residual is the fixed 5x5 KV predictor-residual kernel (KerBohme
/// family, coefficients scaled by 1/12) applied with mirror padding.
class FilterLogitOracle final : public ModelOracle {
public:
    static constexpr double kDefaultGain = 0.02;
    static constexpr double kDefaultBias = -2.0;

    explicit FilterLogitOracle(double gain = kDefaultGain, double bias = kDefaultBias);

    double score(const GrayImage& img) const override;
    std::unique_ptr<PixelScorer> prepare(const GrayImage& img) const override;
    std::string id() const override { return "filter-logit"; }

    double gain() const noexcept { return gain_; }
    double bias() const noexcept { return bias_; }

    /// 5x5 KV kernel, row-major, already scaled by 1/12. Coefficients sum to 0.
    static const std::array<double, 25>& kernel() noexcept;

private:
    double gain_;
    double bias_;
};

/// Trainable reference oracle: logistic regression over
/// residual_histogram_features. Weight layout matches the feature layout.
class LinearResidualOracle final : public ModelOracle {
public:
    static constexpr int kDefaultTruncation = 3;

    LinearResidualOracle(std::vector<double> weights, double bias,
                         int truncation = kDefaultTruncation);

    /// Untrained model: all-zero weights, zero bias (scores 0.5 everywhere).
    static LinearResidualOracle zeros(int truncation = kDefaultTruncation);

    double score(const GrayImage& img) const override;
    std::unique_ptr<PixelScorer> prepare(const GrayImage& img) const override;
    std::string id() const override { return "linear-residual"; }

    int truncation() const noexcept { return truncation_; }
    int feature_dim() const noexcept { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    double bias() const noexcept { return bias_; }

private:
    std::vector<double> weights_;
    double bias_;
    int truncation_;
};

/// Stencil-verification fixture: depends on a single pixel, with
/// score = a * v^2 + b * v + c for the target pixel's value v.
class QuadraticTestOracle final : public ModelOracle {
public:
    QuadraticTestOracle(int target_row, int target_col, double a, double b, double c);

    double score(const GrayImage& img) const override;
    std::unique_ptr<PixelScorer> prepare(const GrayImage& img) const override;
    std::string id() const override { return "quadratic-test"; }

    double value_score(double v) const noexcept { return (a_ * v + b_) * v + c_; }

private:
    int target_row_;
    int target_col_;
    double a_, b_, c_;
};

/// Plain logistic model shared by the trainable oracle and the detector.
struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;

    double score(std::span<const double> features) const noexcept;
};

struct SgdOptions {
    int epochs = 200;
    double rate = 0.5;
    double l2 = 0.0;  // optional ridge penalty, off by default
    std::uint64_t seed = 0;
};

/// Seeded SGD for logistic regression on aligned cover/stego feature pairs
/// (label 0 = cover, 1 = stego). Pairs are shuffled per epoch but an image
/// and its stego version stay adjacent. Deterministic given the seed.
LogisticModel train_logistic_pairs(const std::vector<std::vector<double>>& cover_features,
                                   const std::vector<std::vector<double>>& stego_features,
                                   const SgdOptions& options);

/// Training-set accuracy at threshold 0.5; a score of exactly 0.5 classifies
/// as cover.
double pair_training_accuracy(const LogisticModel& model,
                              const std::vector<std::vector<double>>& cover_features,
                              const std::vector<std::vector<double>>& stego_features);

struct OracleTrainResult {
    LinearResidualOracle oracle;
    double train_accuracy = 0.0;
};

/// Fits a LinearResidualOracle on aligned cover/stego image lists.
/// Throws ConfigError for empty or mismatched lists.
OracleTrainResult train_linear_oracle(const std::vector<GrayImage>& covers,
                                      const std::vector<GrayImage>& stegos, int epochs,
                                      double rate, std::uint64_t seed,
                                      int truncation = LinearResidualOracle::kDefaultTruncation,
                                      double l2 = 0.0);

/// Versioned plain-text serialization: one header line
/// "stegcost-oracle v1 <kind> <weight-count> <T>" followed by
/// whitespace-separated decimal weights printed with 17 significant digits,
/// so reloaded oracles reproduce scores exactly.
std::string write_oracle(const ModelOracle& oracle);
std::unique_ptr<ModelOracle> read_oracle(std::string_view text);
void save_oracle(const ModelOracle& oracle, const std::filesystem::path& path);
std::unique_ptr<ModelOracle> load_oracle(const std::filesystem::path& path);

}  // namespace stegcost
