#include "stegcost/pgm.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "stegcost/errors.hpp"

namespace stegcost {

namespace {

bool is_pgm_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderCursor {
public:
    explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void skip_space_and_comments() {
        while (pos_ < bytes_.size()) {
            char c = bytes_[pos_];
            if (is_pgm_space(c)) {
                ++pos_;
            } else if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    // Unsigned decimal token. Rejects anything that does not start with a digit.
    long parse_uint(const char* what) {
        skip_space_and_comments();
        std::size_t start = pos_;
        if (pos_ >= bytes_.size() || !std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            throw ParseError(std::string("expected ") + what + " in PGM header", pos_);
        }
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L) {
                throw ParseError(std::string(what) + " out of range in PGM header", start);
            }
            ++pos_;
        }
        return value;
    }

    void advance(std::size_t n) { pos_ += n; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

GrayImage read_pgm(std::string_view bytes, bool enforce_min_dims) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw ParseError("not a binary PGM: expected magic \"P5\"", 0);
    }
    HeaderCursor cur(bytes);
    cur.advance(2);

    std::size_t width_at = 0;
    cur.skip_space_and_comments();
    width_at = cur.pos();
    long width = cur.parse_uint("width");
    cur.skip_space_and_comments();
    std::size_t height_at = cur.pos();
    long height = cur.parse_uint("height");
    cur.skip_space_and_comments();
    std::size_t maxval_at = cur.pos();
    long maxval = cur.parse_uint("maxval");

    if (width < 1) throw ParseError("width must be positive", width_at);
    if (height < 1) throw ParseError("height must be positive", height_at);
    if (maxval != 255) {
        throw ParseError("unsupported maxval " + std::to_string(maxval) + " (only 255)", maxval_at);
    }
    if (enforce_min_dims && (width < kMinImageSize || height < kMinImageSize)) {
        throw ParseError("image is " + std::to_string(width) + "x" + std::to_string(height) +
                             ", smaller than the supported minimum " +
                             std::to_string(kMinImageSize) + "x" + std::to_string(kMinImageSize),
                         width_at);
    }

    // Exactly one whitespace byte separates the header from the raster.
    if (cur.pos() >= bytes.size() || !is_pgm_space(bytes[cur.pos()])) {
        throw ParseError("expected single whitespace byte before raster", cur.pos());
    }
    cur.advance(1);

    std::size_t raster_at = cur.pos();
    std::size_t need = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    if (bytes.size() - raster_at < need) {
        throw ParseError("truncated raster: need " + std::to_string(need) + " bytes, have " +
                             std::to_string(bytes.size() - raster_at),
                         bytes.size());
    }

    std::vector<std::uint8_t> pixels(need);
    for (std::size_t i = 0; i < need; ++i) {
        pixels[i] = static_cast<std::uint8_t>(bytes[raster_at + i]);
    }
    return GrayImage(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::string write_pgm(const GrayImage& img) {
    std::string out = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) +
                      "\n255\n";
    out.reserve(out.size() + img.pixel_count());
    for (std::uint8_t p : img.pixels()) out.push_back(static_cast<char>(p));
    return out;
}

GrayImage load_pgm(const std::filesystem::path& path) {
    try {
        return read_pgm(read_binary_file(path));
    } catch (const ParseError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    write_binary_file(path, write_pgm(img));
}

std::string read_binary_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed: " + path.string());
    return std::move(buf).str();
}

void write_binary_file(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace stegcost
