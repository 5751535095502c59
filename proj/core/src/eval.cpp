#include "stegcost/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <optional>

#include <nlohmann/json.hpp>

#include "stegcost/errors.hpp"
#include "stegcost/parallel.hpp"
#include "stegcost/pgm.hpp"
#include "stegcost/rng.hpp"
#include "stegcost/synth.hpp"

namespace stegcost {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kTagCover = 0x11;
constexpr std::uint64_t kTagOracleTraining = 0x22;
constexpr std::uint64_t kTagProposed = 0x33;
constexpr std::uint64_t kTagHill = 0x44;

std::uint64_t alpha_key(double alpha) {
    return static_cast<std::uint64_t>(std::llround(alpha * 1e9));
}

}  // namespace

FeatureVector extract_features(const GrayImage& img) {
    return residual_histogram_features(img, kFeatureTruncation);
}

DetectorModel train_detector(const std::vector<FeatureVector>& cover_features,
                             const std::vector<FeatureVector>& stego_features,
                             std::uint64_t seed, int epochs, double rate, double l2) {
    SgdOptions options;
    options.epochs = epochs;
    options.rate = rate;
    options.l2 = l2;
    options.seed = seed;
    return DetectorModel{train_logistic_pairs(cover_features, stego_features, options)};
}

double detection_error(const DetectorModel& model,
                       const std::vector<FeatureVector>& cover_features,
                       const std::vector<FeatureVector>& stego_features) {
    if (cover_features.empty() || stego_features.empty()) {
        throw ConfigError("detection_error needs nonempty held-out sets");
    }
    std::size_t false_positives = 0;
    for (const auto& f : cover_features) false_positives += model.classify_stego(f);
    std::size_t false_negatives = 0;
    for (const auto& f : stego_features) false_negatives += !model.classify_stego(f);
    double fp = static_cast<double>(false_positives) / static_cast<double>(cover_features.size());
    double fn = static_cast<double>(false_negatives) / static_cast<double>(stego_features.size());
    return 0.5 * (fp + fn);
}

std::vector<GrayImage> load_covers(const CoverSource& source) {
    std::vector<GrayImage> covers;
    if (!source.dir.empty()) {
        std::filesystem::path dir(source.dir);
        std::error_code ec;
        if (!std::filesystem::is_directory(dir, ec)) {
            throw IoError("cover directory not found: " + source.dir);
        }
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw ConfigError("no .pgm files in " + source.dir);
        covers.reserve(files.size());
        for (const auto& f : files) covers.push_back(load_pgm(f));
        return covers;
    }
    const SynthCorpusSpec& spec = source.synth;
    if (spec.count < 1) throw ConfigError("synthetic corpus count must be positive");
    if (spec.kinds.empty()) throw ConfigError("synthetic corpus needs at least one kind");
    covers.reserve(static_cast<std::size_t>(spec.count));
    for (int i = 0; i < spec.count; ++i) {
        const std::string& kind = spec.kinds[static_cast<std::size_t>(i) % spec.kinds.size()];
        covers.push_back(synth_cover(kind, spec.width, spec.height,
                                     derive_seed(spec.seed, {kTagCover, static_cast<std::uint64_t>(i)})));
    }
    return covers;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct ResolvedOracle {
    std::unique_ptr<ModelOracle> owned;
    const ModelOracle* oracle = nullptr;
    std::string id;
};

struct EmbedOutcome {
    FeatureVector features;
    long long solver_iterations = 0;
};

// Embeds every listed cover at the given payload and returns stego features.
// Parallel across covers; all seeds derive from (embed_seed, tags, cover id),
// so the outcome is schedule-independent.
std::vector<EmbedOutcome> embed_and_extract(const std::vector<GrayImage>& covers,
                                            const std::vector<int>& cover_ids,
                                            const std::vector<const CostMap*>& maps,
                                            double alpha, Rule rule, std::uint64_t embed_seed,
                                            std::uint64_t method_tag, std::uint64_t k_tag,
                                            int threads) {
    std::vector<EmbedOutcome> out(cover_ids.size());
    parallel_chunks(static_cast<int>(cover_ids.size()), threads, [&](int begin, int end) {
        for (int idx = begin; idx < end; ++idx) {
            int cover_id = cover_ids[static_cast<std::size_t>(idx)];
            const GrayImage& cover = covers[static_cast<std::size_t>(cover_id)];
            const CostMap& rho = *maps[static_cast<std::size_t>(idx)];
            PayloadSpec payload = PayloadSpec::from_alpha(alpha, cover.width(), cover.height());
            LambdaSolution sol = solve_lambda(rho, payload, rule);
            ChangeProbabilities probs = change_probs(rho, sol.lambda, rule);
            std::uint64_t seed = derive_seed(
                embed_seed,
                {method_tag, k_tag, alpha_key(alpha), static_cast<std::uint64_t>(cover_id)});
            EmbeddingPattern pattern = sample_pattern(probs, seed);
            GrayImage stego = apply_pattern(cover, pattern);
            out[static_cast<std::size_t>(idx)] =
                EmbedOutcome{extract_features(stego), sol.iterations};
        }
    });
    return out;
}

ResolvedOracle resolve_oracle(const SweepConfig& config, const std::vector<GrayImage>& covers,
                              const std::vector<int>& train_ids, int threads) {
    const SweepOracleSpec& spec = config.oracle;
    ResolvedOracle resolved;
    if (spec.kind == "filter-logit") {
        resolved.owned = std::make_unique<FilterLogitOracle>(spec.gain, spec.bias);
        resolved.id = "filter-logit";
    } else if (spec.kind == "linear-file") {
        if (spec.weights_path.empty()) {
            throw ConfigError("oracle kind linear-file needs a weights path");
        }
        resolved.owned = load_oracle(spec.weights_path);
        resolved.id = resolved.owned->id() + ":" + spec.weights_path;
    } else if (spec.kind == "linear-trained") {
        // Baseline-cost stegos of the train split form the training corpus.
        std::vector<CostMap> maps;
        maps.reserve(train_ids.size());
        std::vector<const CostMap*> map_ptrs;
        std::vector<GrayImage> train_covers;
        for (int id : train_ids) {
            train_covers.push_back(covers[static_cast<std::size_t>(id)]);
            maps.push_back(hill_cost(covers[static_cast<std::size_t>(id)]));
        }
        for (const auto& m : maps) map_ptrs.push_back(&m);

        std::vector<GrayImage> stegos(train_ids.size(), GrayImage(1, 1));
        parallel_chunks(static_cast<int>(train_ids.size()), threads, [&](int begin, int end) {
            for (int idx = begin; idx < end; ++idx) {
                const GrayImage& cover = train_covers[static_cast<std::size_t>(idx)];
                PayloadSpec payload =
                    PayloadSpec::from_alpha(spec.train_payload, cover.width(), cover.height());
                LambdaSolution sol = solve_lambda(*map_ptrs[static_cast<std::size_t>(idx)], payload,
                                                  config.rule);
                ChangeProbabilities probs =
                    change_probs(*map_ptrs[static_cast<std::size_t>(idx)], sol.lambda, config.rule);
                std::uint64_t seed = derive_seed(
                    config.embed_seed,
                    {kTagOracleTraining,
                     static_cast<std::uint64_t>(train_ids[static_cast<std::size_t>(idx)])});
                stegos[static_cast<std::size_t>(idx)] =
                    apply_pattern(cover, sample_pattern(probs, seed));
            }
        });

        OracleTrainResult trained = train_linear_oracle(train_covers, stegos, spec.epochs,
                                                        spec.rate, config.train_seed);
        resolved.owned = std::make_unique<LinearResidualOracle>(std::move(trained.oracle));
        resolved.id = "linear-trained";
    } else {
        throw ConfigError("unknown sweep oracle kind \"" + spec.kind + "\"");
    }
    resolved.oracle = resolved.owned.get();
    return resolved;
}

double round_sig12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return std::strtod(buf, nullptr);
}

}  // namespace

ExperimentReport run_sweep(const SweepConfig& config) {
    if (config.payloads.empty()) throw ConfigError("payload list must not be empty");
    if (config.methods.empty()) throw ConfigError("method list must not be empty");
    for (const std::string& m : config.methods) {
        if (m != "proposed" && m != "hill") {
            throw ConfigError("unknown cost method \"" + m + "\"");
        }
    }
    for (double a : config.payloads) {
        if (!(a >= 0.0) || a > kLog2Three) {
            throw ConfigError("payload " + std::to_string(a) + " outside [0, log2(3)]");
        }
    }
    for (int k : config.filter_sizes) {
        if (k < 1 || k % 2 == 0) {
            throw ConfigError("filter sizes must be odd and positive, got " + std::to_string(k));
        }
    }
    if (std::find(config.methods.begin(), config.methods.end(), "proposed") !=
            config.methods.end() &&
        config.filter_sizes.empty()) {
        throw ConfigError("the proposed method needs at least one filter size");
    }

    std::vector<GrayImage> covers = load_covers(config.covers);
    int n = static_cast<int>(covers.size());
    if (n < 40) {
        throw ConfigError("need at least 40 covers, got " + std::to_string(n));
    }
    int train_n = config.train_count > 0 ? config.train_count : n / 2;
    int test_n = config.test_count > 0 ? config.test_count : n - train_n;
    if (train_n < 1 || test_n < 1 || train_n + test_n > n) {
        throw ConfigError("split overlap: train " + std::to_string(train_n) + " + test " +
                          std::to_string(test_n) + " exceeds " + std::to_string(n) + " covers");
    }

    // Disjoint-by-cover split; a cover and its stego never straddle it.
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    SplitMix64 split_rng(config.split_seed);
    for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[split_rng.next_below(i)]);
    }
    std::vector<int> train_ids(perm.begin(), perm.begin() + train_n);
    std::vector<int> test_ids(perm.begin() + train_n, perm.begin() + train_n + test_n);
    std::vector<int> used_ids = train_ids;
    used_ids.insert(used_ids.end(), test_ids.begin(), test_ids.end());

    std::vector<FeatureVector> cover_features(static_cast<std::size_t>(n));
    parallel_chunks(static_cast<int>(used_ids.size()), config.threads, [&](int begin, int end) {
        for (int idx = begin; idx < end; ++idx) {
            int id = used_ids[static_cast<std::size_t>(idx)];
            cover_features[static_cast<std::size_t>(id)] =
                extract_features(covers[static_cast<std::size_t>(id)]);
        }
    });

    bool wants_proposed = std::find(config.methods.begin(), config.methods.end(), "proposed") !=
                          config.methods.end();
    ResolvedOracle oracle;
    if (wants_proposed) {
        oracle = resolve_oracle(config, covers, train_ids, config.threads);
    }

    std::vector<std::string> methods = config.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
    std::vector<double> payloads = config.payloads;
    std::sort(payloads.begin(), payloads.end());
    std::vector<int> filter_sizes = config.filter_sizes;
    std::sort(filter_sizes.begin(), filter_sizes.end());

    ExperimentReport report;
    report.config = config;

    auto run_configuration = [&](const std::string& method, int k, std::uint64_t method_tag,
                                 const std::vector<const CostMap*>& maps,
                                 long long map_oracle_evals) {
        for (double alpha : payloads) {
            auto outcomes = embed_and_extract(covers, used_ids, maps, alpha, config.rule,
                                              config.embed_seed, method_tag,
                                              static_cast<std::uint64_t>(k), config.threads);

            std::vector<FeatureVector> train_cover_f, train_stego_f, test_cover_f, test_stego_f;
            train_cover_f.reserve(train_ids.size());
            train_stego_f.reserve(train_ids.size());
            for (std::size_t i = 0; i < train_ids.size(); ++i) {
                train_cover_f.push_back(cover_features[static_cast<std::size_t>(train_ids[i])]);
                train_stego_f.push_back(outcomes[i].features);
            }
            for (std::size_t i = 0; i < test_ids.size(); ++i) {
                test_cover_f.push_back(cover_features[static_cast<std::size_t>(test_ids[i])]);
                test_stego_f.push_back(outcomes[train_ids.size() + i].features);
            }

            DetectorModel detector = train_detector(
                train_cover_f, train_stego_f,
                derive_seed(config.train_seed,
                            {method_tag, static_cast<std::uint64_t>(k), alpha_key(alpha)}));
            double p_e = detection_error(detector, test_cover_f, test_stego_f);

            SweepRecord record;
            record.method = method;
            record.oracle_id = method == "proposed" ? oracle.id : "none";
            record.filter_size = k;
            record.alpha = alpha;
            record.p_e = p_e;
            record.embed_seed = config.embed_seed;
            record.split_seed = config.split_seed;
            record.train_seed = config.train_seed;
            record.work.oracle_evaluations = map_oracle_evals;
            for (const auto& o : outcomes) record.work.solver_iterations += o.solver_iterations;
            report.records.push_back(std::move(record));
        }
    };

    for (const std::string& method : methods) {
        if (method == "hill") {
            std::vector<CostMap> maps;
            maps.reserve(used_ids.size());
            for (int id : used_ids) maps.push_back(hill_cost(covers[static_cast<std::size_t>(id)]));
            std::vector<const CostMap*> map_ptrs;
            for (const auto& m : maps) map_ptrs.push_back(&m);
            // HILL's smoothing footprint is fixed at 15; the filter-size list
            // does not apply.
            run_configuration("hill", 15, kTagHill, map_ptrs, 0);
        } else {
            for (int k : filter_sizes) {
                std::vector<std::optional<CostMap>> maps(used_ids.size());
                parallel_chunks(static_cast<int>(used_ids.size()), config.threads,
                                [&](int begin, int end) {
                                    for (int idx = begin; idx < end; ++idx) {
                                        int id = used_ids[static_cast<std::size_t>(idx)];
                                        maps[static_cast<std::size_t>(idx)].emplace(build_cost_map(
                                            *oracle.oracle, covers[static_cast<std::size_t>(id)], k));
                                    }
                                });
                std::vector<const CostMap*> map_ptrs;
                long long evals = 0;
                for (std::size_t i = 0; i < maps.size(); ++i) {
                    map_ptrs.push_back(&*maps[i]);
                    const GrayImage& img = covers[static_cast<std::size_t>(used_ids[i])];
                    evals += 4LL * img.width() * img.height() + 1;
                }
                run_configuration("proposed", k, kTagProposed, map_ptrs, evals);
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ordered_json config_to_json(const SweepConfig& config) {
    ordered_json j;
    if (!config.covers.dir.empty()) {
        j["covers"] = ordered_json{{"dir", config.covers.dir}};
    } else {
        const SynthCorpusSpec& s = config.covers.synth;
        j["covers"] = ordered_json{{"synthetic", ordered_json{{"count", s.count},
                                                              {"width", s.width},
                                                              {"height", s.height},
                                                              {"kinds", s.kinds},
                                                              {"seed", s.seed}}}};
    }
    ordered_json o;
    o["kind"] = config.oracle.kind;
    if (config.oracle.kind == "filter-logit") {
        o["gain"] = round_sig12(config.oracle.gain);
        o["bias"] = round_sig12(config.oracle.bias);
    } else if (config.oracle.kind == "linear-file") {
        o["weights"] = config.oracle.weights_path;
    } else if (config.oracle.kind == "linear-trained") {
        o["train_payload"] = round_sig12(config.oracle.train_payload);
        o["epochs"] = config.oracle.epochs;
        o["rate"] = round_sig12(config.oracle.rate);
    }
    j["oracle"] = o;
    j["methods"] = config.methods;
    j["filter_sizes"] = config.filter_sizes;
    ordered_json alphas = ordered_json::array();
    for (double a : config.payloads) alphas.push_back(round_sig12(a));
    j["payloads"] = alphas;
    j["rule"] = std::string(to_string(config.rule));
    j["train_count"] = config.train_count;
    j["test_count"] = config.test_count;
    // The worker count is a runtime knob, not experiment identity; keeping it
    // out of the report preserves byte-identical output across thread counts.
    j["seeds"] = ordered_json{
        {"embed", config.embed_seed}, {"split", config.split_seed}, {"train", config.train_seed}};
    return j;
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["version"] = report.version;
    j["config"] = config_to_json(report.config);
    ordered_json records = ordered_json::array();
    for (const SweepRecord& r : report.records) {
        ordered_json rec;
        rec["method"] = r.method;
        rec["oracle_id"] = r.oracle_id;
        rec["filter_size"] = r.filter_size;
        rec["alpha"] = round_sig12(r.alpha);
        rec["p_e"] = round_sig12(r.p_e);
        rec["seeds"] = ordered_json{
            {"embed", r.embed_seed}, {"split", r.split_seed}, {"train", r.train_seed}};
        rec["work"] = ordered_json{{"solver_iterations", r.work.solver_iterations},
                                   {"oracle_evaluations", r.work.oracle_evaluations}};
        records.push_back(std::move(rec));
    }
    j["records"] = std::move(records);
    return j.dump(2) + "\n";
}

SweepConfig sweep_config_from_json(std::string_view text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("sweep config is not valid JSON: ") + e.what());
    }

    try {
        SweepConfig config;
        static const std::vector<std::string> known = {
            "covers", "oracle",      "methods",    "filter_sizes", "payloads",
            "rule",   "train_count", "test_count", "seeds",        "threads"};
        for (const auto& [key, value] : j.items()) {
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw ConfigError("unknown sweep config key \"" + key + "\"");
            }
        }

        if (j.contains("covers")) {
            const auto& c = j.at("covers");
            if (c.contains("dir")) {
                config.covers.dir = c.at("dir").get<std::string>();
            } else if (c.contains("synthetic")) {
                const auto& s = c.at("synthetic");
                SynthCorpusSpec spec;
                if (s.contains("count")) spec.count = s.at("count").get<int>();
                if (s.contains("width")) spec.width = s.at("width").get<int>();
                if (s.contains("height")) spec.height = s.at("height").get<int>();
                if (s.contains("kinds")) spec.kinds = s.at("kinds").get<std::vector<std::string>>();
                if (s.contains("seed")) spec.seed = s.at("seed").get<std::uint64_t>();
                config.covers.synth = spec;
            } else {
                throw ConfigError("covers must specify \"dir\" or \"synthetic\"");
            }
        }
        if (j.contains("oracle")) {
            const auto& o = j.at("oracle");
            if (o.contains("kind")) config.oracle.kind = o.at("kind").get<std::string>();
            if (o.contains("gain")) config.oracle.gain = o.at("gain").get<double>();
            if (o.contains("bias")) config.oracle.bias = o.at("bias").get<double>();
            if (o.contains("weights")) config.oracle.weights_path = o.at("weights").get<std::string>();
            if (o.contains("train_payload")) {
                config.oracle.train_payload = o.at("train_payload").get<double>();
            }
            if (o.contains("epochs")) config.oracle.epochs = o.at("epochs").get<int>();
            if (o.contains("rate")) config.oracle.rate = o.at("rate").get<double>();
        }
        if (j.contains("methods")) config.methods = j.at("methods").get<std::vector<std::string>>();
        if (j.contains("filter_sizes")) {
            config.filter_sizes = j.at("filter_sizes").get<std::vector<int>>();
        }
        if (j.contains("payloads")) config.payloads = j.at("payloads").get<std::vector<double>>();
        if (j.contains("rule")) config.rule = rule_from_string(j.at("rule").get<std::string>());
        if (j.contains("train_count")) config.train_count = j.at("train_count").get<int>();
        if (j.contains("test_count")) config.test_count = j.at("test_count").get<int>();
        if (j.contains("seeds")) {
            const auto& s = j.at("seeds");
            if (s.contains("embed")) config.embed_seed = s.at("embed").get<std::uint64_t>();
            if (s.contains("split")) config.split_seed = s.at("split").get<std::uint64_t>();
            if (s.contains("train")) config.train_seed = s.at("train").get<std::uint64_t>();
        }
        if (j.contains("threads")) config.threads = j.at("threads").get<int>();
        return config;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad sweep config: ") + e.what());
    }
}

std::string render_report_table(const ExperimentReport& report) {
    std::string out = "method      k   alpha     p_e\n";
    char line[96];
    for (const SweepRecord& r : report.records) {
        std::snprintf(line, sizeof(line), "%-10s %3d  %6.3f  %6.4f\n", r.method.c_str(),
                      r.filter_size, r.alpha, r.p_e);
        out += line;
    }
    return out;
}

}  // namespace stegcost
