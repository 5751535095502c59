#pragma once

#include <cstdint>
#include <string_view>

#include "stegcost/image.hpp"

namespace stegcost {

/// Deterministic synthetic cover generator; a pure function of its arguments.
///
/// Kinds:
///   "flat:L"      constant intensity L (also plain "flat", L = 128)
///   "gradient"    horizontal ramp from 0 to 255
///   "noise:K"     uniform noise box-filtered with an odd KxK kernel
///                 (also plain "noise", K = 3; K = 1 is raw noise)
///   "two-region"  smooth left half, noisy right half
///
/// Throws ConfigError on unknown kinds or bad parameters, and requires
/// width/height >= kMinImageSize.
GrayImage synth_cover(std::string_view kind, int width, int height, std::uint64_t seed);

}  // namespace stegcost
