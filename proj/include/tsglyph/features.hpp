// ============================================================================
// features.hpp - binary presence features over one- and two-symbol
// subsequences of symbolic representations
//
// The dictionary is built from the TRAIN representations only and ordered
// lexicographically; test extraction ignores subsequences outside it.
// ============================================================================

#pragma once

#include <algorithm>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "tsglyph/autoencoder.hpp"
#include "tsglyph/common.hpp"

namespace tsglyph {

struct FeatureDictionary {
    int depth = 0;
    std::vector<std::string> subsequences;  // sorted, unique, each of length 1 or 2

    int size() const { return static_cast<int>(subsequences.size()); }
};

struct FeatureVector {
    std::vector<std::uint8_t> bits;  // aligned to a FeatureDictionary
    int depth = 0;
};

namespace detail {

inline std::set<std::string> grams_of(const SymbolicRepresentation& rep) {
    std::set<std::string> grams;
    const std::string s = rep.to_string();
    for (size_t i = 0; i < s.size(); ++i) {
        grams.insert(s.substr(i, 1));
        if (i + 1 < s.size()) grams.insert(s.substr(i, 2));
    }
    return grams;
}

}  // namespace detail

inline FeatureDictionary build_dictionary(const std::vector<SymbolicRepresentation>& train_reps) {
    if (train_reps.empty()) throw ArgumentError("build_dictionary: no representations");
    std::set<std::string> all;
    const int depth = train_reps.front().depth;
    for (const auto& rep : train_reps) {
        if (rep.depth != depth) throw ArgumentError("build_dictionary: mixed depths");
        const auto grams = detail::grams_of(rep);
        all.insert(grams.begin(), grams.end());
    }
    FeatureDictionary dict;
    dict.depth = depth;
    dict.subsequences.assign(all.begin(), all.end());  // std::set is already sorted
    return dict;
}

inline FeatureVector extract(const SymbolicRepresentation& rep, const FeatureDictionary& dict) {
    if (rep.depth != dict.depth) throw ArgumentError("extract: representation depth mismatch");
    const auto grams = detail::grams_of(rep);
    FeatureVector fv;
    fv.depth = dict.depth;
    fv.bits.resize(static_cast<size_t>(dict.size()), 0);
    for (size_t j = 0; j < dict.subsequences.size(); ++j)
        if (grams.count(dict.subsequences[j])) fv.bits[j] = 1;
    return fv;
}

// CSV export: header = subsequence strings, one row of 0/1 per instance.
inline void save_feature_matrix(const FeatureDictionary& dict,
                                const std::vector<FeatureVector>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write feature matrix: " + path);
    for (int j = 0; j < dict.size(); ++j)
        out << (j ? "," : "") << dict.subsequences[static_cast<size_t>(j)];
    out << '\n';
    for (const auto& fv : rows) {
        for (size_t j = 0; j < fv.bits.size(); ++j)
            out << (j ? "," : "") << static_cast<int>(fv.bits[j]);
        out << '\n';
    }
}

}  // namespace tsglyph
