// ============================================================================
// dataset.hpp - UCR-style labeled univariate time-series datasets
//
// File format: one instance per row, field 1 = label, fields 2..T+1 = values,
// delimiter tab or comma (auto-detected). Labels are remapped to contiguous
// 0-based ids; the original labels are kept for reporting.
// ============================================================================

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tsglyph/common.hpp"

namespace tsglyph {

struct TimeSeries {
    std::vector<double> values;
    int label = 0;
};

struct TimeSeriesDataset {
    std::vector<TimeSeries> train;
    std::vector<TimeSeries> test;
    std::string name;
    int class_count = 0;
    std::map<int, double> original_labels;  // remapped id -> label as found in the file

    int length() const {
        return train.empty() ? 0 : static_cast<int>(train.front().values.size());
    }
};

namespace detail {

inline char detect_delimiter(const std::string& line) {
    if (line.find('\t') != std::string::npos) return '\t';
    if (line.find(',') != std::string::npos) return ',';
    return ' ';
}

inline std::vector<double> parse_row(const std::string& line, char delim, const std::string& where) {
    std::vector<double> fields;
    std::string token;
    std::stringstream ss(line);
    int pos = 0;
    while (std::getline(ss, token, delim)) {
        ++pos;
        // Space-delimited files may carry runs of separators.
        if (delim == ' ' && token.empty()) continue;
        size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &consumed);
        } catch (const std::exception&) {
            throw FormatError(where + ": non-numeric field " + std::to_string(pos) + " ('" + token + "')");
        }
        while (consumed < token.size() && std::isspace(static_cast<unsigned char>(token[consumed])))
            ++consumed;
        if (consumed != token.size())
            throw FormatError(where + ": non-numeric field " + std::to_string(pos) + " ('" + token + "')");
        if (!std::isfinite(value))
            throw FormatError(where + ": non-finite value in field " + std::to_string(pos));
        fields.push_back(value);
    }
    return fields;
}

struct RawSplit {
    std::vector<std::vector<double>> rows;  // label first
};

inline RawSplit read_split(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open dataset file: " + path);
    RawSplit split;
    std::string line;
    int lineno = 0;
    size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (line.empty()) continue;
        const char delim = detect_delimiter(line);
        auto fields = parse_row(line, delim, path + ":" + std::to_string(lineno));
        if (fields.size() < 2)
            throw FormatError(path + ":" + std::to_string(lineno) + ": row has no value fields");
        if (width == 0) width = fields.size();
        if (fields.size() != width)
            throw FormatError(path + ":" + std::to_string(lineno) + ": ragged row, expected " +
                              std::to_string(width - 1) + " values, got " +
                              std::to_string(fields.size() - 1));
        split.rows.push_back(std::move(fields));
    }
    if (split.rows.empty()) throw FormatError("empty dataset file: " + path);
    return split;
}

}  // namespace detail

inline TimeSeriesDataset load_dataset(const std::string& train_path, const std::string& test_path,
                                      const std::string& name = "") {
    const auto raw_train = detail::read_split(train_path);
    const auto raw_test = detail::read_split(test_path);

    const size_t width = raw_train.rows.front().size();
    if (raw_test.rows.front().size() != width)
        throw FormatError("train/test length mismatch: " + std::to_string(width - 1) + " vs " +
                          std::to_string(raw_test.rows.front().size() - 1));
    if (width - 1 < 8) throw FormatError("series length must be >= 8, got " + std::to_string(width - 1));

    // Collect the label alphabet over both splits, remap to 0..C-1 in ascending order.
    std::map<double, int> remap;
    for (const auto* split : {&raw_train, &raw_test})
        for (const auto& row : split->rows) remap.emplace(row.front(), 0);
    int next = 0;
    for (auto& [orig, id] : remap) id = next++;

    TimeSeriesDataset ds;
    ds.name = name;
    ds.class_count = next;
    for (const auto& [orig, id] : remap) ds.original_labels[id] = orig;

    auto convert = [&](const detail::RawSplit& raw, std::vector<TimeSeries>& out) {
        for (const auto& row : raw.rows) {
            TimeSeries ts;
            ts.label = remap.at(row.front());
            ts.values.assign(row.begin() + 1, row.end());
            out.push_back(std::move(ts));
        }
    };
    convert(raw_train, ds.train);
    convert(raw_test, ds.test);
    return ds;
}

// Per-instance standardization. Population (divide-by-n) variance by default;
// constant instances map to all zeros with a warning on stderr.
inline TimeSeriesDataset znormalize(const TimeSeriesDataset& ds, bool population_variance = true) {
    TimeSeriesDataset out = ds;
    auto normalize_split = [&](std::vector<TimeSeries>& split, const char* split_name) {
        for (size_t i = 0; i < split.size(); ++i) {
            auto& v = split[i].values;
            const double n = static_cast<double>(v.size());
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= n;
            double ss = 0.0;
            for (double x : v) ss += (x - mean) * (x - mean);
            const double denom = population_variance ? n : n - 1.0;
            const double sigma = std::sqrt(ss / denom);
            if (sigma == 0.0) {
                std::cerr << "warning: constant " << split_name << " instance " << i
                          << " normalized to zeros\n";
                std::fill(v.begin(), v.end(), 0.0);
            } else {
                for (double& x : v) x = (x - mean) / sigma;
            }
        }
    };
    normalize_split(out.train, "train");
    normalize_split(out.test, "test");
    return out;
}

// Writes one split back in the input format (original labels, tab delimiter).
inline void save_split(const TimeSeriesDataset& ds, const std::vector<TimeSeries>& split,
                       const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write dataset file: " + path);
    char buf[32];
    for (const auto& ts : split) {
        const double orig = ds.original_labels.count(ts.label)
                                ? ds.original_labels.at(ts.label)
                                : static_cast<double>(ts.label);
        std::snprintf(buf, sizeof buf, "%.17g", orig);
        out << buf;
        for (double v : ts.values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

inline void save_dataset(const TimeSeriesDataset& ds, const std::string& train_path,
                         const std::string& test_path) {
    save_split(ds, ds.train, train_path);
    save_split(ds, ds.test, test_path);
}

}  // namespace tsglyph
