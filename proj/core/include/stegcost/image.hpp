#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <vector>

namespace stegcost {

/// 8-bit grayscale raster, row-major. The cover/stego medium.
///
/// The processing pipeline (stencils, feature windows) requires at least
/// 5x5 images; that bound is enforced at the I/O boundary (read_pgm,
/// synth_cover) so small rasters remain constructible for parser tests.
class GrayImage {
public:
    GrayImage(int width, int height, std::uint8_t fill = 0);
    GrayImage(int width, int height, std::vector<std::uint8_t> pixels);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    std::uint8_t operator()(int row, int col) const noexcept {
        assert(in_bounds(row, col));
        return pixels_[static_cast<std::size_t>(row) * width_ + col];
    }
    void set(int row, int col, std::uint8_t value) noexcept {
        assert(in_bounds(row, col));
        pixels_[static_cast<std::size_t>(row) * width_ + col] = value;
    }

    bool in_bounds(int row, int col) const noexcept {
        return row >= 0 && row < height_ && col >= 0 && col < width_;
    }

    std::span<const std::uint8_t> pixels() const& noexcept { return pixels_; }
    std::span<const std::uint8_t> pixels() const&& = delete;  // would dangle

    bool operator==(const GrayImage&) const = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

/// Reflects an index into [0, size). Symmetric padding with edge duplication:
/// -1 -> 0, -2 -> 1, size -> size-1, size+1 -> size-2. Folds repeatedly for
/// offsets larger than the image.
constexpr int mirror_index(int index, int size) noexcept {
    if (size <= 1) return 0;
    while (index < 0 || index >= size) {
        if (index < 0) index = -index - 1;
        if (index >= size) index = 2 * size - index - 1;
    }
    return index;
}

/// Pixel intensity clamped into [0, 255].
constexpr std::uint8_t clamp_intensity(int value) noexcept {
    if (value < 0) return 0;
    if (value > 255) return 255;
    return static_cast<std::uint8_t>(value);
}

}  // namespace stegcost
