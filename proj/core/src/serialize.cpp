#include "stegcost/serialize.hpp"

#include <bit>
#include <cstring>

#include "stegcost/errors.hpp"
#include "stegcost/pgm.hpp"

namespace stegcost {

namespace {

constexpr std::uint32_t kFormatVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_f64(std::string& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

    void expect_magic(std::string_view magic) {
        if (remaining() < magic.size() || bytes_.substr(pos_, magic.size()) != magic) {
            throw ParseError("bad magic, expected \"" + std::string(magic) + "\"", pos_);
        }
        pos_ += magic.size();
    }

    std::uint32_t get_u32(const char* what) {
        if (remaining() < 4) throw ParseError(std::string("truncated ") + what, pos_);
        std::uint32_t v = 0;
        for (int b = 0; b < 4; ++b) {
            v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes_[pos_ + b])) << (8 * b);
        }
        pos_ += 4;
        return v;
    }

    double get_f64() {
        std::uint64_t v = 0;
        for (int b = 0; b < 8; ++b) {
            v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes_[pos_ + b])) << (8 * b);
        }
        pos_ += 8;
        return std::bit_cast<double>(v);
    }

    std::uint8_t get_u8() { return static_cast<std::uint8_t>(bytes_[pos_++]); }

    void need(std::size_t n, const char* what) {
        if (remaining() < n) {
            throw ParseError(std::string("truncated ") + what + ": need " + std::to_string(n) +
                                 " more bytes, have " + std::to_string(remaining()),
                             bytes_.size());
        }
    }

    void expect_end() {
        if (remaining() != 0) {
            throw ParseError("trailing bytes after payload", pos_);
        }
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

struct Dims {
    int width;
    int height;
    std::size_t count;
};

Dims read_header(Reader& r, std::string_view magic) {
    r.expect_magic(magic);
    std::uint32_t version = r.get_u32("version");
    if (version != kFormatVersion) {
        throw ParseError("unsupported version " + std::to_string(version), 4);
    }
    std::uint32_t w = r.get_u32("width");
    std::uint32_t h = r.get_u32("height");
    if (w < 1 || h < 1 || w > 1u << 20 || h > 1u << 20) {
        throw ParseError("implausible dimensions " + std::to_string(w) + "x" + std::to_string(h),
                         8);
    }
    return Dims{static_cast<int>(w), static_cast<int>(h),
                static_cast<std::size_t>(w) * static_cast<std::size_t>(h)};
}

void write_header(std::string& out, std::string_view magic, int width, int height) {
    out.append(magic);
    put_u32(out, kFormatVersion);
    put_u32(out, static_cast<std::uint32_t>(width));
    put_u32(out, static_cast<std::uint32_t>(height));
}

}  // namespace

std::string serialize_cost_map(const CostMap& map) {
    std::string out;
    out.reserve(16 + map.pixel_count() * 9);
    write_header(out, "COST", map.width(), map.height());
    for (double c : map.costs()) put_f64(out, c);
    for (std::uint8_t w : map.wet_mask()) out.push_back(static_cast<char>(w));
    return out;
}

CostMap deserialize_cost_map(std::string_view bytes) {
    Reader r(bytes);
    Dims d = read_header(r, "COST");
    r.need(d.count * 9, "cost payload");
    CostMap map(d.width, d.height);
    std::vector<double> costs(d.count);
    for (std::size_t i = 0; i < d.count; ++i) costs[i] = r.get_f64();
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            std::uint8_t wet = r.get_u8();
            std::size_t idx = static_cast<std::size_t>(i) * d.width + j;
            if (wet > 1) throw ParseError("wet mask byte must be 0 or 1", r.pos() - 1);
            if (wet) {
                map.set_wet(i, j);
                if (costs[idx] != kWetCost) {
                    throw ParseError("wet pixel without the wet cost", 16 + idx * 8);
                }
            } else {
                map.set_cost(i, j, costs[idx]);
            }
        }
    }
    r.expect_end();
    return map;
}

std::string serialize_probabilities(const ChangeProbabilities& p) {
    std::string out;
    out.reserve(16 + p.pixel_count() * 8 + 1);
    write_header(out, "PROB", p.width(), p.height());
    for (double v : p.values()) put_f64(out, v);
    out.push_back(p.rule() == Rule::gibbs ? '\0' : '\1');
    return out;
}

ChangeProbabilities deserialize_probabilities(std::string_view bytes) {
    Reader r(bytes);
    Dims d = read_header(r, "PROB");
    r.need(d.count * 8 + 1, "probability payload");
    std::vector<double> values(d.count);
    for (std::size_t i = 0; i < d.count; ++i) values[i] = r.get_f64();
    std::uint8_t rule_byte = r.get_u8();
    if (rule_byte > 1) throw ParseError("rule byte must be 0 or 1", r.pos() - 1);
    r.expect_end();
    ChangeProbabilities p(d.width, d.height, rule_byte == 0 ? Rule::gibbs : Rule::capped);
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            p.set(i, j, values[static_cast<std::size_t>(i) * d.width + j]);
        }
    }
    return p;
}

std::string serialize_pattern(const EmbeddingPattern& s) {
    std::string out;
    out.reserve(16 + s.pixel_count());
    write_header(out, "PATT", s.width(), s.height());
    for (std::int8_t v : s.values()) out.push_back(static_cast<char>(v));
    return out;
}

EmbeddingPattern deserialize_pattern(std::string_view bytes) {
    Reader r(bytes);
    Dims d = read_header(r, "PATT");
    r.need(d.count, "pattern payload");
    EmbeddingPattern s(d.width, d.height);
    for (int i = 0; i < d.height; ++i) {
        for (int j = 0; j < d.width; ++j) {
            auto v = static_cast<std::int8_t>(r.get_u8());
            if (v < -1 || v > 1) throw ParseError("pattern byte outside {-1, 0, +1}", r.pos() - 1);
            s.set(i, j, v);
        }
    }
    r.expect_end();
    return s;
}

void save_cost_map(const CostMap& map, const std::filesystem::path& path) {
    write_binary_file(path, serialize_cost_map(map));
}
CostMap load_cost_map(const std::filesystem::path& path) {
    return deserialize_cost_map(read_binary_file(path));
}
void save_probabilities(const ChangeProbabilities& p, const std::filesystem::path& path) {
    write_binary_file(path, serialize_probabilities(p));
}
ChangeProbabilities load_probabilities(const std::filesystem::path& path) {
    return deserialize_probabilities(read_binary_file(path));
}
void save_pattern(const EmbeddingPattern& s, const std::filesystem::path& path) {
    write_binary_file(path, serialize_pattern(s));
}
EmbeddingPattern load_pattern(const std::filesystem::path& path) {
    return deserialize_pattern(read_binary_file(path));
}

}  // namespace stegcost
