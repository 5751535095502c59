#include "stegcost/embed.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stegcost/errors.hpp"
#include "stegcost/parallel.hpp"
#include "stegcost/rng.hpp"

namespace stegcost {

std::string_view to_string(Rule rule) noexcept {
    return rule == Rule::gibbs ? "gibbs" : "capped";
}

Rule rule_from_string(std::string_view name) {
    if (name == "gibbs") return Rule::gibbs;
    if (name == "capped") return Rule::capped;
    throw ConfigError("unknown probability rule \"" + std::string(name) +
                      "\" (expected gibbs or capped)");
}

ChangeProbabilities::ChangeProbabilities(int width, int height, Rule rule)
    : width_(width), height_(height), rule_(rule) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("probability map dimensions must be positive");
    }
    p_change_.assign(static_cast<std::size_t>(width) * height, 0.0);
}

void ChangeProbabilities::set(int row, int col, double p) {
    if (!(p >= 0.0) || p > 1.0 / 3.0 + 1e-12) {
        throw std::invalid_argument("change probability " + std::to_string(p) +
                                    " outside [0, 1/3]");
    }
    p_change_[static_cast<std::size_t>(row) * width_ + col] = p;
}

EmbeddingPattern::EmbeddingPattern(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) {
        throw std::invalid_argument("pattern dimensions must be positive");
    }
    s_.assign(static_cast<std::size_t>(width) * height, 0);
}

void EmbeddingPattern::set(int row, int col, int s) {
    if (s < -1 || s > 1) {
        throw std::invalid_argument("pattern entries must be in {-1, 0, +1}");
    }
    s_[static_cast<std::size_t>(row) * width_ + col] = static_cast<std::int8_t>(s);
}

std::size_t EmbeddingPattern::change_count() const noexcept {
    std::size_t n = 0;
    for (std::int8_t v : s_) n += v != 0;
    return n;
}

PayloadSpec PayloadSpec::from_alpha(double alpha, int width, int height) {
    if (!(alpha >= 0.0) || alpha > kLog2Three) {
        throw NumericError("infeasible payload: alpha=" + std::to_string(alpha) +
                           " outside [0, " + std::to_string(kLog2Three) +
                           "] (max log2(3) bits per pixel)");
    }
    double n = static_cast<double>(width) * height;
    return PayloadSpec{alpha, std::round(alpha * n)};
}

PayloadSpec PayloadSpec::from_bits(double bits, int width, int height) {
    if (!(bits >= 0.0)) throw NumericError("message length must be nonnegative");
    double n = static_cast<double>(width) * height;
    return PayloadSpec{bits / n, bits};
}

ChangeProbabilities gibbs_probs(const CostMap& rho, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    ChangeProbabilities out(rho.width(), rho.height(), Rule::gibbs);
    for (int i = 0; i < rho.height(); ++i) {
        for (int j = 0; j < rho.width(); ++j) {
            if (rho.is_wet(i, j)) continue;  // stays 0
            double e = std::exp(-lambda * rho.cost(i, j));
            out.set(i, j, e / (1.0 + 2.0 * e));
        }
    }
    return out;
}

ChangeProbabilities capped_probs(const CostMap& rho, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    ChangeProbabilities out(rho.width(), rho.height(), Rule::capped);
    for (int i = 0; i < rho.height(); ++i) {
        for (int j = 0; j < rho.width(); ++j) {
            if (rho.is_wet(i, j)) continue;
            out.set(i, j, std::max(1.0 / 3.0 - lambda * rho.cost(i, j), 0.0));
        }
    }
    return out;
}

ChangeProbabilities change_probs(const CostMap& rho, double lambda, Rule rule) {
    return rule == Rule::gibbs ? gibbs_probs(rho, lambda) : capped_probs(rho, lambda);
}

double ternary_entropy_bits(double q) noexcept {
    if (q <= 0.0) return 0.0;
    double p0 = 1.0 - 2.0 * q;
    double bits = -2.0 * q * std::log2(q);
    if (p0 > 0.0) bits -= p0 * std::log2(p0);
    return bits;
}

namespace {

// Fixed-tree pairwise reduction over the row-major sequence.
double pairwise_entropy(std::span<const double> values, std::size_t begin, std::size_t end) {
    if (end - begin <= 16) {
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += ternary_entropy_bits(values[i]);
        return sum;
    }
    std::size_t mid = begin + (end - begin) / 2;
    return pairwise_entropy(values, begin, mid) + pairwise_entropy(values, mid, end);
}

}  // namespace

double pattern_entropy(const ChangeProbabilities& p) {
    return pairwise_entropy(p.values(), 0, p.values().size());
}

LambdaSolution solve_lambda(const CostMap& rho, const PayloadSpec& payload, Rule rule) {
    constexpr double kLambdaCap = 0x1p64;
    double m = payload.message_bits;
    if (!(m >= 0.0)) throw NumericError("message length must be nonnegative");

    std::size_t non_wet = rho.pixel_count() - rho.wet_count();
    double max_bits = static_cast<double>(non_wet) * kLog2Three;
    if (m > max_bits) {
        throw NumericError("infeasible payload: " + std::to_string(m) +
                           " bits requested, at most " + std::to_string(max_bits) +
                           " bits fit (" + std::to_string(non_wet) + " non-wet pixels, alpha <= " +
                           std::to_string(max_bits / static_cast<double>(rho.pixel_count())) + ")");
    }

    double tolerance = std::max(1e-3 * m, 1e-6);
    int evals = 0;
    auto entropy_at = [&](double lambda) {
        ++evals;
        return pattern_entropy(change_probs(rho, lambda, rule));
    };

    if (m == 0.0) {
        if (rule == Rule::gibbs) {
            return LambdaSolution{kLambdaCap, entropy_at(kLambdaCap), evals};
        }
        double lambda = 1.0;
        double bits = entropy_at(lambda);
        while (bits > 0.0) {
            lambda *= 2.0;
            if (lambda > kLambdaCap) {
                throw NumericError("lambda bracket failure at zero payload: entropy " +
                                   std::to_string(bits) + " bits at the cap");
            }
            bits = entropy_at(lambda);
        }
        return LambdaSolution{lambda, bits, evals};
    }

    double entropy_max = entropy_at(0.0);
    if (m >= entropy_max) {
        // Feasibility was vetted above; this is the maximum-entropy endpoint.
        return LambdaSolution{0.0, entropy_max, evals};
    }

    double lo = 0.0;
    double hi = 1.0;
    double bits_hi = entropy_at(hi);
    while (bits_hi >= m) {
        if (std::abs(bits_hi - m) <= tolerance) return LambdaSolution{hi, bits_hi, evals};
        lo = hi;
        hi *= 2.0;
        if (hi > kLambdaCap) {
            throw NumericError("lambda bracket failure: entropy " + std::to_string(bits_hi) +
                               " bits still above target " + std::to_string(m) + " at the cap");
        }
        bits_hi = entropy_at(hi);
    }
    if (std::abs(bits_hi - m) <= tolerance) return LambdaSolution{hi, bits_hi, evals};

    double best_lambda = hi;
    double best_bits = bits_hi;
    for (int step = 0; step < 200; ++step) {
        double mid = 0.5 * (lo + hi);
        double bits = entropy_at(mid);
        if (std::abs(bits - m) < std::abs(best_bits - m)) {
            best_lambda = mid;
            best_bits = bits;
        }
        if (std::abs(bits - m) <= tolerance) {
            return LambdaSolution{mid, bits, evals};
        }
        if (bits >= m) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (std::abs(best_bits - m) <= tolerance) {
        return LambdaSolution{best_lambda, best_bits, evals};
    }
    throw NumericError("lambda bisection did not reach tolerance: best entropy " +
                       std::to_string(best_bits) + " bits for target " + std::to_string(m));
}

EmbeddingPattern sample_pattern(const ChangeProbabilities& p, std::uint64_t seed, int threads) {
    EmbeddingPattern out(p.width(), p.height());
    parallel_chunks(p.height(), threads, [&](int row_begin, int row_end) {
        for (int i = row_begin; i < row_end; ++i) {
            for (int j = 0; j < p.width(); ++j) {
                double q = p.at(i, j);
                if (q <= 0.0) continue;
                double u = unit_double(pixel_key(seed, static_cast<std::uint64_t>(i),
                                                 static_cast<std::uint64_t>(j)));
                if (u < q) {
                    out.set(i, j, +1);
                } else if (u < 2.0 * q) {
                    out.set(i, j, -1);
                }
            }
        }
    });
    return out;
}

GrayImage apply_pattern(const GrayImage& x, const EmbeddingPattern& s) {
    if (x.width() != s.width() || x.height() != s.height()) {
        throw std::invalid_argument("apply_pattern: dimension mismatch");
    }
    GrayImage y = x;
    for (int i = 0; i < x.height(); ++i) {
        for (int j = 0; j < x.width(); ++j) {
            int v = s.at(i, j);
            if (v != 0) y.set(i, j, clamp_intensity(static_cast<int>(x(i, j)) + v));
        }
    }
    return y;
}

double expected_distortion(const ChangeProbabilities& p, const CostMap& rho) {
    if (p.width() != rho.width() || p.height() != rho.height()) {
        throw std::invalid_argument("expected_distortion: dimension mismatch");
    }
    double total = 0.0;
    for (int i = 0; i < p.height(); ++i) {
        for (int j = 0; j < p.width(); ++j) {
            total += 2.0 * p.at(i, j) * rho.cost(i, j);
        }
    }
    return total;
}

}  // namespace stegcost
