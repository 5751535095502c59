#include "stegcost/synth.hpp"

#include <charconv>
#include <string>

#include "stegcost/errors.hpp"
#include "stegcost/pgm.hpp"
#include "stegcost/rng.hpp"

namespace stegcost {

namespace {

long parse_param(std::string_view text, std::string_view kind) {
    long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ConfigError("bad parameter \"" + std::string(text) + "\" for cover kind " +
                          std::string(kind));
    }
    return value;
}

std::uint8_t noise_pixel(std::uint64_t seed, int row, int col) {
    return static_cast<std::uint8_t>(pixel_key(seed, static_cast<std::uint64_t>(row),
                                               static_cast<std::uint64_t>(col)) &
                                     0xFF);
}

// Integer box filter over counter-keyed uniform noise, mirror padding.
int box_filtered_noise(std::uint64_t seed, int row, int col, int width, int height, int k) {
    int half = k / 2;
    long sum = 0;
    for (int dr = -half; dr <= half; ++dr) {
        int r = mirror_index(row + dr, height);
        for (int dc = -half; dc <= half; ++dc) {
            int c = mirror_index(col + dc, width);
            sum += noise_pixel(seed, r, c);
        }
    }
    return static_cast<int>(sum / (static_cast<long>(k) * k));
}

GrayImage make_flat(int width, int height, long level) {
    if (level < 0 || level > 255) {
        throw ConfigError("flat level must be in [0, 255], got " + std::to_string(level));
    }
    return GrayImage(width, height, static_cast<std::uint8_t>(level));
}

GrayImage make_gradient(int width, int height) {
    GrayImage img(width, height);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            int v = width > 1 ? (j * 255 + (width - 1) / 2) / (width - 1) : 0;
            img.set(i, j, clamp_intensity(v));
        }
    }
    return img;
}

GrayImage make_noise(int width, int height, std::uint64_t seed, long k) {
    if (k < 1 || k % 2 == 0) {
        throw ConfigError("noise kernel size must be odd and positive, got " + std::to_string(k));
    }
    GrayImage img(width, height);
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            if (k == 1) {
                img.set(i, j, noise_pixel(seed, i, j));
            } else {
                img.set(i, j, clamp_intensity(box_filtered_noise(seed, i, j, width, height,
                                                                 static_cast<int>(k))));
            }
        }
    }
    return img;
}

GrayImage make_two_region(int width, int height, std::uint64_t seed) {
    constexpr int kSmoothKernel = 5;
    GrayImage img(width, height);
    int split = width / 2;
    for (int i = 0; i < height; ++i) {
        for (int j = 0; j < width; ++j) {
            if (j < split) {
                img.set(i, j, clamp_intensity(box_filtered_noise(seed, i, j, width, height,
                                                                 kSmoothKernel)));
            } else {
                img.set(i, j, noise_pixel(seed, i, j));
            }
        }
    }
    return img;
}

}  // namespace

GrayImage synth_cover(std::string_view kind, int width, int height, std::uint64_t seed) {
    if (width < kMinImageSize || height < kMinImageSize) {
        throw ConfigError("cover dimensions must be at least " + std::to_string(kMinImageSize) +
                          "x" + std::to_string(kMinImageSize));
    }

    std::string_view name = kind;
    std::string_view param;
    if (auto colon = kind.find(':'); colon != std::string_view::npos) {
        name = kind.substr(0, colon);
        param = kind.substr(colon + 1);
    }

    if (name == "flat") return make_flat(width, height, param.empty() ? 128 : parse_param(param, kind));
    if (name == "gradient") {
        if (!param.empty()) throw ConfigError("gradient takes no parameter");
        return make_gradient(width, height);
    }
    if (name == "noise") return make_noise(width, height, seed, param.empty() ? 3 : parse_param(param, kind));
    if (name == "two-region") {
        if (!param.empty()) throw ConfigError("two-region takes no parameter");
        return make_two_region(width, height, seed);
    }
    throw ConfigError("unknown cover kind \"" + std::string(kind) + "\"");
}

}  // namespace stegcost
