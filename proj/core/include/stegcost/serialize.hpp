#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "stegcost/cost.hpp"
#include "stegcost/embed.hpp"

namespace stegcost {

/// Binary map formats. Each starts with a 16-byte header: a 4-byte magic
/// ("COST", "PROB" or "PATT"), then version, width and height as
/// little-endian u32. Payloads are row-major:
///   COST  w*h little-endian f64 costs, then w*h wet-mask bytes (0/1)
///   PROB  w*h little-endian f64 change probabilities, then one rule byte
///         (0 = gibbs, 1 = capped)
///   PATT  w*h signed bytes in {-1, 0, +1}
/// Round-trips are bit-exact. Readers throw ParseError on malformed input.

std::string serialize_cost_map(const CostMap& map);
CostMap deserialize_cost_map(std::string_view bytes);

std::string serialize_probabilities(const ChangeProbabilities& p);
ChangeProbabilities deserialize_probabilities(std::string_view bytes);

std::string serialize_pattern(const EmbeddingPattern& s);
EmbeddingPattern deserialize_pattern(std::string_view bytes);

void save_cost_map(const CostMap& map, const std::filesystem::path& path);
CostMap load_cost_map(const std::filesystem::path& path);
void save_probabilities(const ChangeProbabilities& p, const std::filesystem::path& path);
ChangeProbabilities load_probabilities(const std::filesystem::path& path);
void save_pattern(const EmbeddingPattern& s, const std::filesystem::path& path);
EmbeddingPattern load_pattern(const std::filesystem::path& path);

}  // namespace stegcost
