#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stegcost/embed.hpp"
#include "stegcost/image.hpp"
#include "stegcost/oracle.hpp"

namespace stegcost {

using FeatureVector = std::vector<double>;

/// Truncation used by the evaluation features; matches the trainable
/// oracle's default so detector and oracle see the same image model.
inline constexpr int kFeatureTruncation = LinearResidualOracle::kDefaultTruncation;

/// Steganalysis features of one image. Identical to the trainable oracle's
/// feature map: two normalized difference histograms, vector sum 2.
FeatureVector extract_features(const GrayImage& img);

/// Seeded logistic detector over feature vectors.
struct DetectorModel {
    LogisticModel model;

    double score(const FeatureVector& features) const noexcept { return model.score(features); }
    /// A score of exactly 0.5 classifies as cover.
    bool classify_stego(const FeatureVector& features) const noexcept {
        return score(features) > 0.5;
    }
};

inline constexpr int kDetectorEpochs = 200;
inline constexpr double kDetectorRate = 0.5;

DetectorModel train_detector(const std::vector<FeatureVector>& cover_features,
                             const std::vector<FeatureVector>& stego_features,
                             std::uint64_t seed, int epochs = kDetectorEpochs,
                             double rate = kDetectorRate, double l2 = 0.0);

/// P_E = (false positive rate + false negative rate) / 2 at threshold 0.5.
double detection_error(const DetectorModel& model,
                       const std::vector<FeatureVector>& cover_features,
                       const std::vector<FeatureVector>& stego_features);

// ---------------------------------------------------------------------------
// Sweep experiments

// The default desk corpus is mildly textured (heavily smoothed noise):
// rough covers hide +-1 changes from the truncated difference histograms and
// every detector flatlines at 0.5, while overly flat covers make every method
// trivially detectable. Absolute P_E values are corpus-specific either way.
struct SynthCorpusSpec {
    int count = 200;
    int width = 64;
    int height = 64;
    std::vector<std::string> kinds = {"noise:13"};  // cycled per index
    std::uint64_t seed = 1;
};

/// Cover source: a directory of PGM files (taken in sorted filename order)
/// or a synthetic corpus.
struct CoverSource {
    std::string dir;  // empty means synthetic
    SynthCorpusSpec synth;
};

/// Oracle used by the proposed cost inside a sweep.
///   "filter-logit"    analytic oracle with gain/bias
///   "linear-file"     trainable oracle loaded from weights_path
///   "linear-trained"  trained inside the sweep on the train split, against
///                     baseline-cost stegos at train_payload
struct SweepOracleSpec {
    std::string kind = "linear-trained";
    std::string weights_path;
    double gain = FilterLogitOracle::kDefaultGain;
    double bias = FilterLogitOracle::kDefaultBias;
    double train_payload = 0.4;
    int epochs = kDetectorEpochs;
    double rate = kDetectorRate;
};

struct SweepConfig {
    CoverSource covers;
    SweepOracleSpec oracle;
    std::vector<std::string> methods = {"proposed"};  // "proposed" and/or "hill"
    std::vector<int> filter_sizes = {kDefaultFilterSize};  // proposed only
    std::vector<double> payloads;
    Rule rule = Rule::capped;
    int train_count = 0;  // 0 = half of the corpus
    int test_count = 0;   // 0 = the rest
    std::uint64_t embed_seed = 1;
    std::uint64_t split_seed = 2;
    std::uint64_t train_seed = 3;
    int threads = 1;
};

/// Deterministic work counters recorded per sweep record in place of wall
/// time, so reports stay byte-identical across reruns and thread counts.
struct WorkCounters {
    long long solver_iterations = 0;
    long long oracle_evaluations = 0;
};

struct SweepRecord {
    std::string method;
    std::string oracle_id;
    int filter_size = 0;
    double alpha = 0.0;
    double p_e = 0.0;
    std::uint64_t embed_seed = 0;
    std::uint64_t split_seed = 0;
    std::uint64_t train_seed = 0;
    WorkCounters work;
};

struct ExperimentReport {
    int version = 1;
    SweepConfig config;
    std::vector<SweepRecord> records;  // canonical order: (method, k, alpha)
};

/// Runs the full experiment: embed on every cover, extract features, train a
/// detector on the train split and report P_E on the disjoint test split,
/// for every (method, filter size, payload) combination. Cost maps are
/// computed once per (method, filter size) and reused across payloads.
/// Fully reproducible from the config's seeds.
ExperimentReport run_sweep(const SweepConfig& config);

/// Versioned JSON document {version, config, records[]}; numbers carry at
/// most 12 significant digits. Byte-identical across reruns of the same
/// config.
std::string report_to_json(const ExperimentReport& report);

/// Parses the sweep configuration JSON (same schema report_to_json embeds).
SweepConfig sweep_config_from_json(std::string_view text);

/// Plain-text P_E table, one row per record.
std::string render_report_table(const ExperimentReport& report);

/// Materializes the cover list from either source. Throws ConfigError when a
/// directory contains no PGM files.
std::vector<GrayImage> load_covers(const CoverSource& source);

}  // namespace stegcost
