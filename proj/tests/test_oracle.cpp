#include <doctest.h>

#include <cmath>

#include "stegcost/errors.hpp"
#include "stegcost/oracle.hpp"
#include "stegcost/parallel.hpp"
#include "stegcost/synth.hpp"
#include "support.hpp"

using namespace stegcost;

namespace {

// Independent full rescore: materialize the altered image and score it.
double brute_rescore(const ModelOracle& oracle, const GrayImage& img, int i, int j, int v) {
    GrayImage altered = img;
    altered.set(i, j, static_cast<std::uint8_t>(v));
    return oracle.score(altered);
}

}  // namespace

TEST_CASE("KV kernel coefficients sum to zero") {
    double sum = 0.0;
    for (double k : FilterLogitOracle::kernel()) sum += k;
    CHECK(sum == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("filter-logit score of a flat image is logistic(bias)") {
    FilterLogitOracle oracle(0.05, -1.25);
    GrayImage flat = synth_cover("flat:128", 16, 16, 0);
    CHECK(oracle.score(flat) == doctest::Approx(logistic(-1.25)).epsilon(1e-15));
}

TEST_CASE("quadratic test oracle evaluates its polynomial") {
    GrayImage img(8, 8, 10);
    QuadraticTestOracle oracle(3, 4, 1.0, 0.0, 0.0);
    CHECK(oracle.score(img) == 100.0);
    QuadraticTestOracle affine(0, 0, 0.0, 2.0, 5.0);
    CHECK(affine.score(img) == 25.0);
}

TEST_CASE("linear-residual oracle with zero weights scores logistic(bias)") {
    LinearResidualOracle zero = LinearResidualOracle::zeros();
    GrayImage img = testsupport::random_image(16, 16, 3);
    CHECK(zero.score(img) == 0.5);

    auto weights = zero.weights();
    LinearResidualOracle biased(weights, 0.75);
    CHECK(biased.score(img) == doctest::Approx(logistic(0.75)).epsilon(1e-15));
}

TEST_CASE("detector-style scores stay strictly inside (0, 1)") {
    GrayImage img = testsupport::random_image(16, 16, 11);
    for (double gain : {0.0, 0.02, 5.0}) {
        FilterLogitOracle oracle(gain, -2.0);
        double s = oracle.score(img);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("score_with_pixel of the current value equals the base score") {
    GrayImage img = testsupport::random_image(12, 12, 5);
    FilterLogitOracle fl;
    LinearResidualOracle lr(std::vector<double>(14, 0.3), -0.1);
    for (const ModelOracle* oracle : {static_cast<const ModelOracle*>(&fl),
                                      static_cast<const ModelOracle*>(&lr)}) {
        double base = oracle->score(img);
        CHECK(oracle->score_with_pixel(img, 4, 7, img(4, 7)) == base);
    }
}

TEST_CASE("incremental rescoring matches brute force on interior and corner pixels") {
    GrayImage img = testsupport::random_image(32, 32, 17);
    FilterLogitOracle fl(0.03, -1.0);
    std::vector<double> w(14);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = 0.1 * static_cast<double>(k) - 0.6;
    LinearResidualOracle lr(w, 0.2);

    for (const ModelOracle* oracle : {static_cast<const ModelOracle*>(&fl),
                                      static_cast<const ModelOracle*>(&lr)}) {
        auto scorer = oracle->prepare(img);
        SplitMix64 rng(99);
        for (int trial = 0; trial < 200; ++trial) {
            int i = static_cast<int>(rng.next_below(32));
            int j = static_cast<int>(rng.next_below(32));
            int v = static_cast<int>(rng.next_below(256));
            double fast = scorer->score_with_pixel(i, j, static_cast<std::uint8_t>(v));
            double slow = brute_rescore(*oracle, img, i, j, v);
            CHECK(std::abs(fast - slow) <= 1e-12);
        }
        // corners exercise the mirrored reads
        for (auto [i, j] : {std::pair{0, 0}, {0, 31}, {31, 0}, {31, 31}}) {
            double fast = scorer->score_with_pixel(i, j, 7);
            CHECK(std::abs(fast - brute_rescore(*oracle, img, i, j, 7)) <= 1e-12);
        }
    }
}

TEST_CASE("a shared scorer gives identical answers under concurrent callers") {
    GrayImage img = testsupport::random_image(24, 24, 33);
    FilterLogitOracle oracle(0.04, -1.5);
    auto scorer = oracle.prepare(img);

    struct Edit {
        int i, j, v;
    };
    std::vector<Edit> edits;
    SplitMix64 rng(8);
    for (int t = 0; t < 512; ++t) {
        edits.push_back(Edit{static_cast<int>(rng.next_below(24)),
                             static_cast<int>(rng.next_below(24)),
                             static_cast<int>(rng.next_below(256))});
    }
    std::vector<double> sequential(edits.size());
    for (std::size_t t = 0; t < edits.size(); ++t) {
        sequential[t] = scorer->score_with_pixel(edits[t].i, edits[t].j,
                                                 static_cast<std::uint8_t>(edits[t].v));
    }
    std::vector<double> concurrent(edits.size());
    parallel_chunks(static_cast<int>(edits.size()), 4, [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
            concurrent[static_cast<std::size_t>(t)] = scorer->score_with_pixel(
                edits[static_cast<std::size_t>(t)].i, edits[static_cast<std::size_t>(t)].j,
                static_cast<std::uint8_t>(edits[static_cast<std::size_t>(t)].v));
        }
    });
    CHECK(concurrent == sequential);
}

TEST_CASE("score_with_pixel validates its arguments") {
    GrayImage img = testsupport::random_image(8, 8, 1);
    FilterLogitOracle oracle;
    CHECK_THROWS_AS(oracle.score_with_pixel(img, 8, 0, 100), std::out_of_range);
    CHECK_THROWS_AS(oracle.score_with_pixel(img, 0, -1, 100), std::out_of_range);
    CHECK_THROWS_AS(oracle.score_with_pixel(img, 0, 0, 256), std::invalid_argument);
    CHECK_THROWS_AS(oracle.score_with_pixel(img, 0, 0, -1), std::invalid_argument);
}

TEST_CASE("residual histogram features sum to two") {
    for (std::uint64_t seed : {0ull, 5ull}) {
        GrayImage img = testsupport::random_image(16, 16, seed);
        auto f = residual_histogram_features(img, 3);
        REQUIRE(f.size() == 14);
        double sum = 0.0;
        for (double v : f) sum += v;
        CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("flat image features concentrate in the zero-difference bin") {
    GrayImage flat = synth_cover("flat:90", 8, 8, 0);
    auto f = residual_histogram_features(flat, 3);
    CHECK(f[3] == doctest::Approx(1.0));   // horizontal zero bin
    CHECK(f[10] == doctest::Approx(1.0));  // vertical zero bin
}

TEST_CASE("training on identical lists stays at chance") {
    std::vector<GrayImage> covers;
    for (int k = 0; k < 8; ++k) covers.push_back(testsupport::random_image(16, 16, 100 + k));
    auto result = train_linear_oracle(covers, covers, 50, 0.5, 1);
    CHECK(result.train_accuracy == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("training separates covers from checkerboard-noised stegos") {
    std::vector<GrayImage> covers, stegos;
    for (int k = 0; k < 16; ++k) {
        GrayImage cover = synth_cover("flat:" + std::to_string(100 + 3 * k), 24, 24, 0);
        GrayImage stego = cover;
        for (int i = 0; i < 24; ++i) {
            for (int j = 0; j < 24; ++j) {
                int delta = ((i + j) % 2 == 0) ? 1 : -1;
                stego.set(i, j, clamp_intensity(static_cast<int>(cover(i, j)) + delta));
            }
        }
        covers.push_back(std::move(cover));
        stegos.push_back(std::move(stego));
    }
    auto result = train_linear_oracle(covers, stegos, 100, 0.5, 7);
    CHECK(result.train_accuracy > 0.9);
}

TEST_CASE("zero-epoch training returns the untrained model") {
    std::vector<GrayImage> covers = {testsupport::random_image(8, 8, 1),
                                     testsupport::random_image(8, 8, 2)};
    auto result = train_linear_oracle(covers, covers, 0, 0.5, 1);
    for (double w : result.oracle.weights()) CHECK(w == 0.0);
    CHECK(result.oracle.bias() == 0.0);
    CHECK(result.train_accuracy == doctest::Approx(0.5));
}

TEST_CASE("training rejects empty or mismatched lists") {
    std::vector<GrayImage> one = {testsupport::random_image(8, 8, 1)};
    std::vector<GrayImage> two = {testsupport::random_image(8, 8, 1),
                                  testsupport::random_image(8, 8, 2)};
    std::vector<GrayImage> none;
    CHECK_THROWS_AS(train_linear_oracle(none, none, 1, 0.5, 1), ConfigError);
    CHECK_THROWS_AS(train_linear_oracle(one, two, 1, 0.5, 1), ConfigError);
}

TEST_CASE("training is deterministic given the seed") {
    std::vector<GrayImage> covers, stegos;
    for (int k = 0; k < 6; ++k) {
        covers.push_back(testsupport::random_image(12, 12, 300 + k));
        stegos.push_back(testsupport::random_image(12, 12, 400 + k));
    }
    auto a = train_linear_oracle(covers, stegos, 20, 0.3, 42);
    auto b = train_linear_oracle(covers, stegos, 20, 0.3, 42);
    CHECK(a.oracle.weights() == b.oracle.weights());
    CHECK(a.oracle.bias() == b.oracle.bias());
}

TEST_CASE("oracle serialization round-trips scores exactly") {
    GrayImage img = testsupport::random_image(16, 16, 21);

    FilterLogitOracle fl(0.0317, -1.739);
    auto fl_back = read_oracle(write_oracle(fl));
    CHECK(std::abs(fl_back->score(img) - fl.score(img)) <= 1e-15);

    std::vector<double> w(14);
    SplitMix64 rng(5);
    for (double& x : w) x = rng.next_unit() * 4.0 - 2.0;
    LinearResidualOracle lr(w, 0.123456789012345678);
    auto lr_back = read_oracle(write_oracle(lr));
    CHECK(std::abs(lr_back->score(img) - lr.score(img)) <= 1e-15);
    for (auto [i, j] : {std::pair{0, 0}, {5, 9}}) {
        CHECK(lr_back->score_with_pixel(img, i, j, 13) == lr.score_with_pixel(img, i, j, 13));
    }
}

TEST_CASE("oracle parser rejects malformed input") {
    CHECK_THROWS_AS(read_oracle("garbage"), ConfigError);
    CHECK_THROWS_AS(read_oracle("stegcost-oracle v1 cnn 2 0\n1 2\n"), ConfigError);
    CHECK_THROWS_AS(read_oracle("stegcost-oracle v2 filter-logit 2 0\n1 2\n"), ConfigError);
    CHECK_THROWS_AS(read_oracle("stegcost-oracle v1 filter-logit 2 0\n1\n"), ConfigError);
    CHECK_THROWS_AS(read_oracle("stegcost-oracle v1 filter-logit 2 0\n1 2 3\n"), ConfigError);
    CHECK_THROWS_AS(read_oracle("stegcost-oracle v1 linear-residual 14 0\n"), ConfigError);
}
