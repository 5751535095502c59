#include "stegcost/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "stegcost/errors.hpp"
#include "stegcost/pgm.hpp"
#include "stegcost/rng.hpp"

namespace stegcost {

double logistic(double z) noexcept {
    double p;
    if (z >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        double e = std::exp(z);
        p = e / (1.0 + e);
    }
    // Stay strictly inside (0, 1) even when exp saturates.
    if (p <= 0.0) return std::numeric_limits<double>::min();
    if (p >= 1.0) return 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    return p;
}

namespace {

// Read-only pixel view with an optional single-pixel override, applied after
// mirroring so altered border pixels are also seen through their reflections.
struct PixelView {
    const std::uint8_t* data;
    int width;
    int height;
    int override_row = -1;
    int override_col = -1;
    int override_value = 0;

    int at_mirrored(int row, int col) const noexcept {
        row = mirror_index(row, height);
        col = mirror_index(col, width);
        if (row == override_row && col == override_col) return override_value;
        return data[static_cast<std::size_t>(row) * width + col];
    }
};

PixelView view_of(const GrayImage& img) noexcept {
    return PixelView{img.pixels().data(), img.width(), img.height()};
}

double kv_residual_at(const PixelView& view, int row, int col) noexcept {
    const auto& k = FilterLogitOracle::kernel();
    double acc = 0.0;
    for (int u = 0; u < 5; ++u) {
        for (int v = 0; v < 5; ++v) {
            acc += k[static_cast<std::size_t>(u) * 5 + v] * view.at_mirrored(row + u - 2, col + v - 2);
        }
    }
    return acc;
}

int truncated_bin(int diff, int truncation) noexcept {
    diff = std::clamp(diff, -truncation, truncation);
    return diff + truncation;
}

// First-order differences toward the mirrored right/bottom neighbor.
int hdiff_at(const PixelView& view, int row, int col) noexcept {
    return view.at_mirrored(row, col + 1) - view.at_mirrored(row, col);
}
int vdiff_at(const PixelView& view, int row, int col) noexcept {
    return view.at_mirrored(row + 1, col) - view.at_mirrored(row, col);
}

void difference_counts(const GrayImage& img, int truncation, std::vector<long long>& hcounts,
                       std::vector<long long>& vcounts) {
    int bins = 2 * truncation + 1;
    hcounts.assign(static_cast<std::size_t>(bins), 0);
    vcounts.assign(static_cast<std::size_t>(bins), 0);
    PixelView view = view_of(img);
    for (int i = 0; i < img.height(); ++i) {
        for (int j = 0; j < img.width(); ++j) {
            ++hcounts[static_cast<std::size_t>(truncated_bin(hdiff_at(view, i, j), truncation))];
            ++vcounts[static_cast<std::size_t>(truncated_bin(vdiff_at(view, i, j), truncation))];
        }
    }
}

}  // namespace

std::vector<double> residual_histogram_features(const GrayImage& img, int truncation) {
    if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
    std::vector<long long> hcounts, vcounts;
    difference_counts(img, truncation, hcounts, vcounts);
    std::vector<double> features;
    features.reserve(hcounts.size() + vcounts.size());
    double n = static_cast<double>(img.pixel_count());
    for (long long c : hcounts) features.push_back(static_cast<double>(c) / n);
    for (long long c : vcounts) features.push_back(static_cast<double>(c) / n);
    return features;
}

// ---------------------------------------------------------------------------
// ModelOracle base

namespace {

class FullRescoreScorer final : public PixelScorer {
public:
    FullRescoreScorer(const ModelOracle& oracle, const GrayImage& img)
        : oracle_(oracle), img_(img), base_(oracle.score(img)) {}

    double base_score() const noexcept override { return base_; }

    double score_with_pixel(int row, int col, std::uint8_t value) const override {
        GrayImage altered = img_;
        altered.set(row, col, value);
        return oracle_.score(altered);
    }

private:
    const ModelOracle& oracle_;
    GrayImage img_;
    double base_;
};

}  // namespace

std::unique_ptr<PixelScorer> ModelOracle::prepare(const GrayImage& img) const {
    return std::make_unique<FullRescoreScorer>(*this, img);
}

double ModelOracle::score_with_pixel(const GrayImage& img, int row, int col, int value) const {
    if (!img.in_bounds(row, col)) {
        throw std::out_of_range("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                                ") outside " + std::to_string(img.width()) + "x" +
                                std::to_string(img.height()) + " image");
    }
    if (value < 0 || value > 255) {
        throw std::invalid_argument("pixel value " + std::to_string(value) + " outside [0, 255]");
    }
    return prepare(img)->score_with_pixel(row, col, static_cast<std::uint8_t>(value));
}

// ---------------------------------------------------------------------------
// FilterLogitOracle

const std::array<double, 25>& FilterLogitOracle::kernel() noexcept {
    static const std::array<double, 25> k = [] {
        constexpr int raw[25] = {
            -1, 2,  -2,  2,  -1,  //
            2,  -6, 8,   -6, 2,   //
            -2, 8,  -12, 8,  -2,  //
            2,  -6, 8,   -6, 2,   //
            -1, 2,  -2,  2,  -1,
        };
        std::array<double, 25> out{};
        for (int i = 0; i < 25; ++i) out[static_cast<std::size_t>(i)] = raw[i] / 12.0;
        return out;
    }();
    return k;
}

FilterLogitOracle::FilterLogitOracle(double gain, double bias) : gain_(gain), bias_(bias) {
    if (!std::isfinite(gain) || !std::isfinite(bias)) {
        throw std::invalid_argument("filter-logit gain/bias must be finite");
    }
}

namespace {

class FilterLogitScorer final : public PixelScorer {
public:
    FilterLogitScorer(const GrayImage& img, double gain, double bias)
        : pixels_(img.pixels().begin(), img.pixels().end()),
          width_(img.width()),
          height_(img.height()),
          gain_(gain),
          bias_(bias) {
        abs_residual_.resize(pixels_.size());
        PixelView view{pixels_.data(), width_, height_};
        double sum = 0.0;
        for (int r = 0; r < height_; ++r) {
            for (int c = 0; c < width_; ++c) {
                double a = std::abs(kv_residual_at(view, r, c));
                abs_residual_[static_cast<std::size_t>(r) * width_ + c] = a;
                sum += a;
            }
        }
        sum_abs_ = sum;
        base_ = score_from_sum(sum);
    }

    double base_score() const noexcept override { return base_; }

    double score_with_pixel(int row, int col, std::uint8_t value) const override {
        if (value == pixels_[static_cast<std::size_t>(row) * width_ + col]) return base_;
        PixelView view{pixels_.data(), width_, height_, row, col, value};
        // A changed pixel only reaches residual cells within Chebyshev
        // distance 2, mirrored reads included.
        int r0 = std::max(0, row - 2), r1 = std::min(height_ - 1, row + 2);
        int c0 = std::max(0, col - 2), c1 = std::min(width_ - 1, col + 2);
        double delta = 0.0;
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                delta += std::abs(kv_residual_at(view, r, c)) -
                         abs_residual_[static_cast<std::size_t>(r) * width_ + c];
            }
        }
        return score_from_sum(sum_abs_ + delta);
    }

private:
    double score_from_sum(double sum) const noexcept {
        double mean = sum / static_cast<double>(pixels_.size());
        return logistic(gain_ * mean + bias_);
    }

    std::vector<std::uint8_t> pixels_;
    int width_;
    int height_;
    double gain_;
    double bias_;
    std::vector<double> abs_residual_;
    double sum_abs_ = 0.0;
    double base_ = 0.0;
};

}  // namespace

double FilterLogitOracle::score(const GrayImage& img) const {
    PixelView view = view_of(img);
    double sum = 0.0;
    for (int r = 0; r < img.height(); ++r) {
        for (int c = 0; c < img.width(); ++c) {
            sum += std::abs(kv_residual_at(view, r, c));
        }
    }
    double mean = sum / static_cast<double>(img.pixel_count());
    return logistic(gain_ * mean + bias_);
}

std::unique_ptr<PixelScorer> FilterLogitOracle::prepare(const GrayImage& img) const {
    return std::make_unique<FilterLogitScorer>(img, gain_, bias_);
}

// ---------------------------------------------------------------------------
// LinearResidualOracle

LinearResidualOracle::LinearResidualOracle(std::vector<double> weights, double bias, int truncation)
    : weights_(std::move(weights)), bias_(bias), truncation_(truncation) {
    if (truncation < 1) throw std::invalid_argument("truncation must be >= 1");
    std::size_t expect = 2 * (2 * static_cast<std::size_t>(truncation) + 1);
    if (weights_.size() != expect) {
        throw std::invalid_argument("expected " + std::to_string(expect) + " weights, got " +
                                    std::to_string(weights_.size()));
    }
    for (double w : weights_) {
        if (!std::isfinite(w)) throw std::invalid_argument("oracle weights must be finite");
    }
    if (!std::isfinite(bias)) throw std::invalid_argument("oracle bias must be finite");
}

LinearResidualOracle LinearResidualOracle::zeros(int truncation) {
    return LinearResidualOracle(
        std::vector<double>(2 * (2 * static_cast<std::size_t>(truncation) + 1), 0.0), 0.0,
        truncation);
}

namespace {

// Both the full and the incremental path score through this one function, so
// an incremental rescore is bit-identical to rescoring the altered image.
double score_from_counts(std::span<const double> weights, double bias,
                         std::span<const long long> hcounts, std::span<const long long> vcounts,
                         double pixel_count) noexcept {
    double z = bias;
    std::size_t bins = hcounts.size();
    for (std::size_t k = 0; k < bins; ++k) {
        z += weights[k] * (static_cast<double>(hcounts[k]) / pixel_count);
    }
    for (std::size_t k = 0; k < bins; ++k) {
        z += weights[bins + k] * (static_cast<double>(vcounts[k]) / pixel_count);
    }
    return logistic(z);
}

class LinearResidualScorer final : public PixelScorer {
public:
    LinearResidualScorer(const GrayImage& img, std::vector<double> weights, double bias,
                         int truncation)
        : pixels_(img.pixels().begin(), img.pixels().end()),
          width_(img.width()),
          height_(img.height()),
          weights_(std::move(weights)),
          bias_(bias),
          truncation_(truncation) {
        difference_counts(img, truncation, hcounts_, vcounts_);
        base_ = score_from_counts(weights_, bias_, hcounts_, vcounts_,
                                  static_cast<double>(pixels_.size()));
    }

    double base_score() const noexcept override { return base_; }

    double score_with_pixel(int row, int col, std::uint8_t value) const override {
        if (value == pixels_[static_cast<std::size_t>(row) * width_ + col]) return base_;
        PixelView before{pixels_.data(), width_, height_};
        PixelView after{pixels_.data(), width_, height_, row, col, value};

        auto hc = hcounts_;
        auto vc = vcounts_;
        auto move_bin = [this](std::vector<long long>& counts, int old_diff, int new_diff) {
            --counts[static_cast<std::size_t>(truncated_bin(old_diff, truncation_))];
            ++counts[static_cast<std::size_t>(truncated_bin(new_diff, truncation_))];
        };
        // Only differences that read pixel (row, col) can move: the one at the
        // pixel and the one from its left/top neighbor.
        for (int c : {col - 1, col}) {
            if (c < 0) continue;
            move_bin(hc, hdiff_at(before, row, c), hdiff_at(after, row, c));
        }
        for (int r : {row - 1, row}) {
            if (r < 0) continue;
            move_bin(vc, vdiff_at(before, r, col), vdiff_at(after, r, col));
        }
        return score_from_counts(weights_, bias_, hc, vc, static_cast<double>(pixels_.size()));
    }

private:
    std::vector<std::uint8_t> pixels_;
    int width_;
    int height_;
    std::vector<double> weights_;
    double bias_;
    int truncation_;
    std::vector<long long> hcounts_, vcounts_;
    double base_ = 0.0;
};

}  // namespace

double LinearResidualOracle::score(const GrayImage& img) const {
    std::vector<long long> hcounts, vcounts;
    difference_counts(img, truncation_, hcounts, vcounts);
    return score_from_counts(weights_, bias_, hcounts, vcounts,
                             static_cast<double>(img.pixel_count()));
}

std::unique_ptr<PixelScorer> LinearResidualOracle::prepare(const GrayImage& img) const {
    return std::make_unique<LinearResidualScorer>(img, weights_, bias_, truncation_);
}

// ---------------------------------------------------------------------------
// QuadraticTestOracle

QuadraticTestOracle::QuadraticTestOracle(int target_row, int target_col, double a, double b,
                                         double c)
    : target_row_(target_row), target_col_(target_col), a_(a), b_(b), c_(c) {
    if (target_row < 0 || target_col < 0) {
        throw std::invalid_argument("target pixel coordinates must be nonnegative");
    }
}

double QuadraticTestOracle::score(const GrayImage& img) const {
    if (!img.in_bounds(target_row_, target_col_)) {
        throw std::out_of_range("quadratic oracle target outside image");
    }
    return value_score(img(target_row_, target_col_));
}

namespace {

class QuadraticScorer final : public PixelScorer {
public:
    QuadraticScorer(const QuadraticTestOracle& oracle, int row, int col, double base)
        : oracle_(oracle), row_(row), col_(col), base_(base) {}

    double base_score() const noexcept override { return base_; }

    double score_with_pixel(int row, int col, std::uint8_t value) const override {
        if (row == row_ && col == col_) return oracle_.value_score(value);
        return base_;
    }

private:
    const QuadraticTestOracle& oracle_;
    int row_, col_;
    double base_;
};

}  // namespace

std::unique_ptr<PixelScorer> QuadraticTestOracle::prepare(const GrayImage& img) const {
    return std::make_unique<QuadraticScorer>(*this, target_row_, target_col_, score(img));
}

// ---------------------------------------------------------------------------
// Logistic training

double LogisticModel::score(std::span<const double> features) const noexcept {
    double z = bias;
    for (std::size_t k = 0; k < weights.size() && k < features.size(); ++k) {
        z += weights[k] * features[k];
    }
    return logistic(z);
}

namespace {

void check_pair_lists(std::size_t covers, std::size_t stegos) {
    if (covers == 0 || stegos == 0) throw ConfigError("training lists must be nonempty");
    if (covers != stegos) {
        throw ConfigError("cover/stego list size mismatch: " + std::to_string(covers) + " vs " +
                          std::to_string(stegos));
    }
}

}  // namespace

LogisticModel train_logistic_pairs(const std::vector<std::vector<double>>& cover_features,
                                   const std::vector<std::vector<double>>& stego_features,
                                   const SgdOptions& options) {
    check_pair_lists(cover_features.size(), stego_features.size());
    std::size_t dim = cover_features.front().size();
    for (const auto& f : cover_features) {
        if (f.size() != dim) throw ConfigError("inconsistent feature dimensions");
    }
    for (const auto& f : stego_features) {
        if (f.size() != dim) throw ConfigError("inconsistent feature dimensions");
    }

    LogisticModel model;
    model.weights.assign(dim, 0.0);
    model.bias = 0.0;

    auto step = [&](const std::vector<double>& f, double label) {
        double g = model.score(f) - label;
        for (std::size_t k = 0; k < dim; ++k) {
            model.weights[k] -= options.rate * (g * f[k] + options.l2 * model.weights[k]);
        }
        model.bias -= options.rate * g;
    };

    std::vector<std::size_t> order(cover_features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    SplitMix64 rng(options.seed);
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::size_t j = rng.next_below(i);
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t idx : order) {
            // Keep each cover and its stego version in the same step.
            step(cover_features[idx], 0.0);
            step(stego_features[idx], 1.0);
        }
    }
    return model;
}

double pair_training_accuracy(const LogisticModel& model,
                              const std::vector<std::vector<double>>& cover_features,
                              const std::vector<std::vector<double>>& stego_features) {
    check_pair_lists(cover_features.size(), stego_features.size());
    std::size_t correct = 0;
    for (const auto& f : cover_features) {
        if (!(model.score(f) > 0.5)) ++correct;  // 0.5 classifies as cover
    }
    for (const auto& f : stego_features) {
        if (model.score(f) > 0.5) ++correct;
    }
    return static_cast<double>(correct) /
           static_cast<double>(cover_features.size() + stego_features.size());
}

OracleTrainResult train_linear_oracle(const std::vector<GrayImage>& covers,
                                      const std::vector<GrayImage>& stegos, int epochs,
                                      double rate, std::uint64_t seed, int truncation, double l2) {
    check_pair_lists(covers.size(), stegos.size());
    std::vector<std::vector<double>> cover_features, stego_features;
    cover_features.reserve(covers.size());
    stego_features.reserve(stegos.size());
    for (const auto& img : covers) cover_features.push_back(residual_histogram_features(img, truncation));
    for (const auto& img : stegos) stego_features.push_back(residual_histogram_features(img, truncation));

    SgdOptions options;
    options.epochs = epochs;
    options.rate = rate;
    options.l2 = l2;
    options.seed = seed;
    LogisticModel model = train_logistic_pairs(cover_features, stego_features, options);
    double accuracy = pair_training_accuracy(model, cover_features, stego_features);
    return OracleTrainResult{
        LinearResidualOracle(std::move(model.weights), model.bias, truncation), accuracy};
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

constexpr std::string_view kOracleMagic = "stegcost-oracle";
constexpr std::string_view kOracleVersion = "v1";

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    return buf;
}

}  // namespace

std::string write_oracle(const ModelOracle& oracle) {
    std::string out;
    if (const auto* fl = dynamic_cast<const FilterLogitOracle*>(&oracle)) {
        out = std::string(kOracleMagic) + " " + std::string(kOracleVersion) + " filter-logit 2 0\n";
        out += format_weight(fl->gain()) + " " + format_weight(fl->bias()) + "\n";
        return out;
    }
    if (const auto* lr = dynamic_cast<const LinearResidualOracle*>(&oracle)) {
        out = std::string(kOracleMagic) + " " + std::string(kOracleVersion) + " linear-residual " +
              std::to_string(lr->feature_dim()) + " " + std::to_string(lr->truncation()) + "\n";
        for (double w : lr->weights()) out += format_weight(w) + " ";
        out += format_weight(lr->bias()) + "\n";
        return out;
    }
    throw ConfigError("oracle kind \"" + oracle.id() + "\" has no serialized form");
}

std::unique_ptr<ModelOracle> read_oracle(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string magic, version, kind;
    long dims = -1, truncation = -1;
    if (!(in >> magic >> version >> kind >> dims >> truncation)) {
        throw ConfigError("malformed oracle header");
    }
    if (magic != kOracleMagic) throw ConfigError("not an oracle file (bad magic)");
    if (version != kOracleVersion) throw ConfigError("unsupported oracle version " + version);

    auto read_numbers = [&](std::size_t count) {
        std::vector<double> values(count);
        for (std::size_t i = 0; i < count; ++i) {
            if (!(in >> values[i])) throw ConfigError("oracle file ends before all weights");
        }
        return values;
    };

    std::unique_ptr<ModelOracle> oracle;
    if (kind == "filter-logit") {
        if (dims != 2 || truncation != 0) throw ConfigError("bad filter-logit header");
        auto v = read_numbers(2);
        oracle = std::make_unique<FilterLogitOracle>(v[0], v[1]);
    } else if (kind == "linear-residual") {
        if (truncation < 1 || dims != 2 * (2 * truncation + 1)) {
            throw ConfigError("bad linear-residual header");
        }
        auto v = read_numbers(static_cast<std::size_t>(dims) + 1);
        double bias = v.back();
        v.pop_back();
        oracle = std::make_unique<LinearResidualOracle>(std::move(v), bias,
                                                        static_cast<int>(truncation));
    } else {
        throw ConfigError("unknown oracle kind \"" + kind + "\"");
    }

    std::string trailing;
    if (in >> trailing) throw ConfigError("trailing content in oracle file");
    return oracle;
}

void save_oracle(const ModelOracle& oracle, const std::filesystem::path& path) {
    write_binary_file(path, write_oracle(oracle));
}

std::unique_ptr<ModelOracle> load_oracle(const std::filesystem::path& path) {
    return read_oracle(read_binary_file(path));
}

}  // namespace stegcost
