#include <doctest.h>

#include "stegcost/errors.hpp"
#include "stegcost/serialize.hpp"
#include "support.hpp"

using namespace stegcost;

TEST_CASE("cost map serialization is bit-exact") {
    CostMap map = testsupport::random_cost_map(9, 7, 3, 0.0, 5.0);
    map.set_wet(0, 0);
    map.set_wet(6, 8);
    std::string bytes = serialize_cost_map(map);
    CHECK(bytes.substr(0, 4) == "COST");
    CHECK(bytes.size() == 16 + 63 * 8 + 63);

    CostMap back = deserialize_cost_map(bytes);
    CHECK(back.width() == 9);
    CHECK(back.height() == 7);
    CHECK(serialize_cost_map(back) == bytes);
    CHECK(back.is_wet(0, 0));
    CHECK(back.cost(0, 0) == kWetCost);
}

TEST_CASE("probability serialization keeps the rule and the exact values") {
    CostMap map = testsupport::random_cost_map(6, 5, 4, 0.2, 2.0);
    for (Rule rule : {Rule::gibbs, Rule::capped}) {
        ChangeProbabilities probs = change_probs(map, 0.37, rule);
        std::string bytes = serialize_probabilities(probs);
        CHECK(bytes.substr(0, 4) == "PROB");
        ChangeProbabilities back = deserialize_probabilities(bytes);
        CHECK(back.rule() == rule);
        CHECK(serialize_probabilities(back) == bytes);
    }
}

TEST_CASE("pattern serialization stores signed bytes") {
    CostMap map = testsupport::random_cost_map(8, 8, 5, 0.05, 0.4);
    EmbeddingPattern pattern = sample_pattern(capped_probs(map, 0.1), 12);
    REQUIRE(pattern.change_count() > 0);
    std::string bytes = serialize_pattern(pattern);
    CHECK(bytes.substr(0, 4) == "PATT");
    CHECK(bytes.size() == 16 + 64);
    EmbeddingPattern back = deserialize_pattern(bytes);
    CHECK(back == pattern);
    CHECK(serialize_pattern(back) == bytes);
}

TEST_CASE("map readers reject malformed bytes") {
    CostMap map = testsupport::random_cost_map(5, 5, 6);
    std::string bytes = serialize_cost_map(map);

    CHECK_THROWS_AS(deserialize_cost_map(bytes.substr(0, 30)), ParseError);
    CHECK_THROWS_AS(deserialize_cost_map(bytes + "x"), ParseError);

    std::string wrong_magic = bytes;
    wrong_magic[0] = 'K';
    CHECK_THROWS_AS(deserialize_cost_map(wrong_magic), ParseError);

    std::string wrong_version = bytes;
    wrong_version[4] = 9;
    CHECK_THROWS_AS(deserialize_cost_map(wrong_version), ParseError);

    CHECK_THROWS_AS(deserialize_pattern(serialize_cost_map(map)), ParseError);

    std::string bad_rule = serialize_probabilities(capped_probs(map, 1.0));
    bad_rule.back() = 7;
    CHECK_THROWS_AS(deserialize_probabilities(bad_rule), ParseError);
}

TEST_CASE("file round-trips") {
    auto dir = std::filesystem::temp_directory_path() / "stegcost_serialize_test";
    std::filesystem::create_directories(dir);

    CostMap map = testsupport::random_cost_map(8, 6, 7);
    save_cost_map(map, dir / "m.cost");
    CHECK(serialize_cost_map(load_cost_map(dir / "m.cost")) == serialize_cost_map(map));

    EmbeddingPattern pattern = sample_pattern(capped_probs(map, 0.2), 3);
    save_pattern(pattern, dir / "p.patt");
    CHECK(load_pattern(dir / "p.patt") == pattern);

    CHECK_THROWS_AS(load_cost_map(dir / "missing.cost"), IoError);
    std::filesystem::remove_all(dir);
}
