#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsglyph/features.hpp"

using namespace tsglyph;

namespace {

SymbolicRepresentation rep_of(const std::string& symbols, int depth) {
    SymbolicRepresentation rep;
    rep.depth = depth;
    rep.source_length = static_cast<int>(symbols.size()) << depth;
    for (char c : symbols) rep.indices.push_back(parse_symbol(c));
    for (int b = 0; b < depth; ++b) rep.phases.blocks.push_back({0, false, 0});
    return rep;
}

}  // namespace

TEST_CASE("dictionary is the sorted union of unigrams and bigrams") {
    const std::vector<SymbolicRepresentation> reps = {rep_of("ab", 4), rep_of("ba", 4)};
    const auto dict = build_dictionary(reps);
    CHECK(dict.depth == 4);
    CHECK(dict.subsequences == std::vector<std::string>{"a", "ab", "b", "ba"});
}

TEST_CASE("single-symbol alphabet produces unigram and repeated bigram") {
    const auto dict = build_dictionary({rep_of("aa", 2)});
    CHECK(dict.depth == 2);
    CHECK(dict.subsequences == std::vector<std::string>{"a", "aa"});
}

TEST_CASE("extraction marks present subsequences with 1") {
    const auto dict = build_dictionary({rep_of("ab", 3), rep_of("ba", 3)});
    const auto fv = extract(rep_of("ab", 3), dict);
    CHECK(fv.bits == std::vector<std::uint8_t>{1, 1, 1, 0});
}

TEST_CASE("subsequences outside the dictionary are ignored") {
    const auto dict = build_dictionary({rep_of("ab", 3)});
    const auto fv = extract(rep_of("cd", 3), dict);
    CHECK(fv.bits == std::vector<std::uint8_t>{0, 0, 0});
}

TEST_CASE("features are presence bits, invariant to multiplicity") {
    const auto dict = build_dictionary({rep_of("aaa", 2)});
    const auto short_rep = extract(rep_of("aa", 2), dict);
    const auto long_rep = extract(rep_of("aaaaa", 2), dict);
    CHECK(short_rep.bits == long_rep.bits);
}

TEST_CASE("mixed depths are rejected") {
    CHECK_THROWS_AS(build_dictionary({rep_of("ab", 2), rep_of("ab", 3)}), ArgumentError);
    const auto dict = build_dictionary({rep_of("ab", 2)});
    CHECK_THROWS_AS(extract(rep_of("ab", 3), dict), ArgumentError);
}

TEST_CASE("empty representation list is rejected") {
    CHECK_THROWS_AS(build_dictionary({}), ArgumentError);
}

TEST_CASE("feature matrix CSV has subsequence header and 0/1 rows") {
    const auto dict = build_dictionary({rep_of("ab", 3), rep_of("ba", 3)});
    const std::vector<FeatureVector> rows = {extract(rep_of("ab", 3), dict),
                                             extract(rep_of("b", 3), dict)};
    const std::string path = "test_features_matrix.csv";
    save_feature_matrix(dict, rows, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "a,ab,b,ba");
    std::getline(in, line);
    CHECK(line == "1,1,1,0");
    std::getline(in, line);
    CHECK(line == "0,0,1,0");
    std::remove(path.c_str());
}
