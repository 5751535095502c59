// stegcost: cost-map computation, embedding simulation, oracle training and
// detectability sweeps over PGM images.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stegcost/cost.hpp"
#include "stegcost/embed.hpp"
#include "stegcost/errors.hpp"
#include "stegcost/eval.hpp"
#include "stegcost/oracle.hpp"
#include "stegcost/pgm.hpp"
#include "stegcost/rng.hpp"
#include "stegcost/serialize.hpp"
#include "stegcost/synth.hpp"

namespace {

using namespace stegcost;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitNumeric = 4;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

struct OracleFlags {
    std::string kind = "filter-logit";
    std::string weights_path;
    double gain = FilterLogitOracle::kDefaultGain;
    double bias = FilterLogitOracle::kDefaultBias;
};

void add_oracle_flags(CLI::App* cmd, OracleFlags& flags) {
    cmd->add_option("--oracle", flags.kind, "Oracle kind: filter-logit or linear")
        ->check(CLI::IsMember({"filter-logit", "linear"}));
    cmd->add_option("--oracle-weights", flags.weights_path,
                    "Oracle weights file (required for --oracle linear)");
    cmd->add_option("--gain", flags.gain, "filter-logit gain");
    cmd->add_option("--bias", flags.bias, "filter-logit bias");
}

std::unique_ptr<ModelOracle> make_oracle(const OracleFlags& flags) {
    if (flags.kind == "linear") {
        if (flags.weights_path.empty()) {
            throw ConfigError("--oracle linear needs --oracle-weights <file>");
        }
        if (!std::filesystem::exists(flags.weights_path)) {
            throw ConfigError("oracle weights file not found: " + flags.weights_path);
        }
        return load_oracle(flags.weights_path);
    }
    if (!flags.weights_path.empty()) {
        if (!std::filesystem::exists(flags.weights_path)) {
            throw ConfigError("oracle weights file not found: " + flags.weights_path);
        }
        return load_oracle(flags.weights_path);
    }
    return std::make_unique<FilterLogitOracle>(flags.gain, flags.bias);
}

void check_odd_filter(int k) {
    if (k < 1 || k % 2 == 0) {
        throw ConfigError("filter size must be odd and positive, got " + std::to_string(k));
    }
}

CostMap compute_cost(const std::string& method, const OracleFlags& oracle_flags,
                     const GrayImage& cover, int k, int threads) {
    if (method == "hill") return hill_cost(cover);
    check_odd_filter(k);
    auto oracle = make_oracle(oracle_flags);
    return build_cost_map(*oracle, cover, k, threads);
}

struct NonWetStats {
    std::size_t wet = 0;
    std::size_t non_wet = 0;
    double min = 0.0, max = 0.0, mean = 0.0;
};

NonWetStats cost_stats(const CostMap& map) {
    NonWetStats stats;
    double sum = 0.0;
    bool first = true;
    for (int i = 0; i < map.height(); ++i) {
        for (int j = 0; j < map.width(); ++j) {
            if (map.is_wet(i, j)) {
                ++stats.wet;
                continue;
            }
            double c = map.cost(i, j);
            if (first) {
                stats.min = stats.max = c;
                first = false;
            } else {
                stats.min = std::min(stats.min, c);
                stats.max = std::max(stats.max, c);
            }
            sum += c;
            ++stats.non_wet;
        }
    }
    if (stats.non_wet > 0) stats.mean = sum / static_cast<double>(stats.non_wet);
    return stats;
}

// --- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string kind = "noise:3";
    int width = 64;
    int height = 64;
    std::uint64_t seed = 0;
    std::string output;
};

int run_synth(const SynthArgs& args) {
    GrayImage img = synth_cover(args.kind, args.width, args.height, args.seed);
    save_pgm(img, args.output);
    std::cout << "kind=" << args.kind << " width=" << args.width << " height=" << args.height
              << " seed=" << args.seed << " output=" << args.output << "\n";
    return 0;
}

// --- cost -------------------------------------------------------------------

struct CostArgs {
    std::string input;
    std::string output;
    std::string method = "proposed";
    OracleFlags oracle;
    int k = kDefaultFilterSize;
    int threads = 1;
};

int run_cost(const CostArgs& args) {
    GrayImage cover = load_pgm(args.input);
    CostMap map = compute_cost(args.method, args.oracle, cover, args.k, args.threads);
    save_cost_map(map, args.output);
    NonWetStats stats = cost_stats(map);
    std::cout << "wet=" << stats.wet << " nonwet=" << stats.non_wet << " min=" << fmt(stats.min)
              << " max=" << fmt(stats.max) << " mean=" << fmt(stats.mean)
              << " output=" << args.output << "\n";
    return 0;
}

// --- embed ------------------------------------------------------------------

struct EmbedArgs {
    std::string input;
    std::string output;
    std::string cost_path;
    std::string pattern_path;
    std::string probs_path;
    std::string meta_path;
    std::string method = "proposed";
    OracleFlags oracle;
    int k = kDefaultFilterSize;
    double alpha = 0.4;
    std::string rule = "capped";
    std::uint64_t seed = 0;
    int threads = 1;
};

int run_embed(const EmbedArgs& args) {
    GrayImage cover = load_pgm(args.input);
    Rule rule = rule_from_string(args.rule);

    CostMap map = args.cost_path.empty()
                      ? compute_cost(args.method, args.oracle, cover, args.k, args.threads)
                      : load_cost_map(args.cost_path);
    if (map.width() != cover.width() || map.height() != cover.height()) {
        throw ConfigError("cost map is " + std::to_string(map.width()) + "x" +
                          std::to_string(map.height()) + " but the cover is " +
                          std::to_string(cover.width()) + "x" + std::to_string(cover.height()));
    }

    PayloadSpec payload = PayloadSpec::from_alpha(args.alpha, cover.width(), cover.height());
    LambdaSolution sol = solve_lambda(map, payload, rule);
    ChangeProbabilities probs = change_probs(map, sol.lambda, rule);
    EmbeddingPattern pattern = sample_pattern(probs, args.seed, args.threads);
    GrayImage stego = apply_pattern(cover, pattern);
    double distortion = expected_distortion(probs, map);

    save_pgm(stego, args.output);
    if (!args.pattern_path.empty()) save_pattern(pattern, args.pattern_path);
    if (!args.probs_path.empty()) save_probabilities(probs, args.probs_path);
    if (!args.meta_path.empty()) {
        ordered_json meta;
        meta["version"] = 1;
        meta["input"] = args.input;
        meta["output"] = args.output;
        meta["alpha"] = args.alpha;
        meta["message_bits"] = payload.message_bits;
        meta["rule"] = args.rule;
        meta["lambda"] = sol.lambda;
        meta["entropy_bits"] = sol.entropy_bits;
        meta["solver_iterations"] = sol.iterations;
        meta["expected_distortion"] = distortion;
        meta["change_count"] = pattern.change_count();
        meta["wet_count"] = map.wet_count();
        meta["seed"] = args.seed;
        meta["generator"] = std::string(kPixelRngId);
        write_binary_file(args.meta_path, meta.dump(2) + "\n");
    }

    std::cout << "lambda=" << fmt(sol.lambda) << " entropy_bits=" << fmt(sol.entropy_bits)
              << " message_bits=" << fmt(payload.message_bits)
              << " expected_distortion=" << fmt(distortion)
              << " changes=" << pattern.change_count() << " wet=" << map.wet_count()
              << " seed=" << args.seed << " rule=" << args.rule << " generator=" << kPixelRngId
              << " output=" << args.output << "\n";
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    std::string config_path;
    std::string output;
    int threads = 0;  // 0: honor the config
};

int run_sweep_cmd(const SweepArgs& args) {
    SweepConfig config = sweep_config_from_json(read_binary_file(args.config_path));
    if (args.threads > 0) config.threads = args.threads;
    ExperimentReport report = run_sweep(config);
    write_binary_file(args.output, report_to_json(report));
    std::cout << render_report_table(report);
    std::cout << "records=" << report.records.size() << " output=" << args.output << "\n";
    return 0;
}

// --- train-oracle -----------------------------------------------------------

struct TrainArgs {
    std::string cover_dir;
    std::string stego_dir;
    std::string output;
    int epochs = 200;
    double rate = 0.5;
    double l2 = 0.0;
    std::uint64_t seed = 0;
    int truncation = LinearResidualOracle::kDefaultTruncation;
};

std::map<std::string, std::filesystem::path> pgm_listing(const std::string& dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(dir, ec)) {
        throw IoError("directory not found: " + dir);
    }
    std::map<std::string, std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") {
            files[entry.path().filename().string()] = entry.path();
        }
    }
    if (files.empty()) throw ConfigError("no .pgm files in " + dir);
    return files;
}

int run_train(const TrainArgs& args) {
    auto cover_files = pgm_listing(args.cover_dir);
    auto stego_files = pgm_listing(args.stego_dir);
    for (const auto& [name, path] : cover_files) {
        if (!stego_files.count(name)) {
            throw ConfigError("stego directory is missing \"" + name + "\"");
        }
    }
    for (const auto& [name, path] : stego_files) {
        if (!cover_files.count(name)) {
            throw ConfigError("cover directory is missing \"" + name + "\"");
        }
    }

    std::vector<GrayImage> covers, stegos;
    covers.reserve(cover_files.size());
    stegos.reserve(stego_files.size());
    for (const auto& [name, path] : cover_files) {
        covers.push_back(load_pgm(path));
        stegos.push_back(load_pgm(stego_files.at(name)));
    }

    OracleTrainResult result = train_linear_oracle(covers, stegos, args.epochs, args.rate,
                                                   args.seed, args.truncation, args.l2);
    save_oracle(result.oracle, args.output);
    std::cout << "accuracy=" << fmt(result.train_accuracy) << " pairs=" << covers.size()
              << " epochs=" << args.epochs << " seed=" << args.seed << " output=" << args.output
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steganographic cost toolkit"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic cover image");
    synth_cmd->add_option("--kind", synth_args.kind, "flat[:L] | gradient | noise[:K] | two-region");
    synth_cmd->add_option("--width", synth_args.width, "Image width")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--height", synth_args.height, "Image height")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_args.seed, "Generator seed");
    synth_cmd->add_option("--output", synth_args.output, "Output PGM path")->required();

    CostArgs cost_args;
    CLI::App* cost_cmd = app.add_subcommand("cost", "Compute a cost map for a cover");
    cost_cmd->add_option("--input", cost_args.input, "Cover PGM")->required();
    cost_cmd->add_option("--output", cost_args.output, "Output cost-map file")->required();
    cost_cmd->add_option("--method", cost_args.method, "Cost method: proposed or hill")
        ->check(CLI::IsMember({"proposed", "hill"}));
    add_oracle_flags(cost_cmd, cost_args.oracle);
    cost_cmd->add_option("--k", cost_args.k, "Smoothing filter size (odd)");
    cost_cmd->add_option("--threads", cost_args.threads, "Worker count, 0 = auto");

    EmbedArgs embed_args;
    CLI::App* embed_cmd = app.add_subcommand("embed", "Simulate embedding into a cover");
    embed_cmd->add_option("--input", embed_args.input, "Cover PGM")->required();
    embed_cmd->add_option("--output", embed_args.output, "Output stego PGM")->required();
    embed_cmd->add_option("--cost", embed_args.cost_path, "Precomputed cost-map file");
    embed_cmd->add_option("--pattern", embed_args.pattern_path, "Output pattern file");
    embed_cmd->add_option("--probs", embed_args.probs_path, "Output change-probability file");
    embed_cmd->add_option("--meta", embed_args.meta_path, "Output metadata JSON");
    embed_cmd->add_option("--method", embed_args.method, "Cost method: proposed or hill")
        ->check(CLI::IsMember({"proposed", "hill"}));
    add_oracle_flags(embed_cmd, embed_args.oracle);
    embed_cmd->add_option("--k", embed_args.k, "Smoothing filter size (odd)");
    embed_cmd->add_option("--alpha", embed_args.alpha, "Relative payload in bits per pixel");
    embed_cmd->add_option("--rule", embed_args.rule, "Probability rule: gibbs or capped")
        ->check(CLI::IsMember({"gibbs", "capped"}));
    embed_cmd->add_option("--seed", embed_args.seed, "Sampling seed");
    embed_cmd->add_option("--threads", embed_args.threads, "Worker count, 0 = auto");

    SweepArgs sweep_args;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a detectability sweep");
    sweep_cmd->add_option("--config", sweep_args.config_path, "Sweep config JSON")->required();
    sweep_cmd->add_option("--output", sweep_args.output, "Output report JSON")->required();
    sweep_cmd->add_option("--threads", sweep_args.threads, "Override the config worker count");

    TrainArgs train_args;
    CLI::App* train_cmd = app.add_subcommand("train-oracle", "Fit the trainable oracle");
    train_cmd->add_option("--covers", train_args.cover_dir, "Cover PGM directory")->required();
    train_cmd->add_option("--stegos", train_args.stego_dir, "Stego PGM directory")->required();
    train_cmd->add_option("--output", train_args.output, "Output weights file")->required();
    train_cmd->add_option("--epochs", train_args.epochs, "Training epochs");
    train_cmd->add_option("--rate", train_args.rate, "Learning rate");
    train_cmd->add_option("--l2", train_args.l2, "Ridge penalty");
    train_cmd->add_option("--seed", train_args.seed, "Shuffling seed");
    train_cmd->add_option("--truncation", train_args.truncation, "Residual truncation T");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (synth_cmd->parsed()) return run_synth(synth_args);
        if (cost_cmd->parsed()) return run_cost(cost_args);
        if (embed_cmd->parsed()) return run_embed(embed_args);
        if (sweep_cmd->parsed()) return run_sweep_cmd(sweep_args);
        if (train_cmd->parsed()) return run_train(train_args);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
