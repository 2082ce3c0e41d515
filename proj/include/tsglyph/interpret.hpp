// ============================================================================
// interpret.hpp - global and local interpretability artifacts
//
// Global: decode the discriminative symbolic subsequences of a class into
// waveform segments (the subsequence is placed at the center of an otherwise
// empty representation with phase 0 everywhere; decoder shift equivariance
// makes interior placements equivalent).
// Local: highlight, on one instance, the input-space pre-images of every
// occurrence of the selected subsequences.
// Artifacts are emitted as deterministic SVG 1.1 plus CSV.
// ============================================================================

#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "tsglyph/autoencoder.hpp"
#include "tsglyph/classifier.hpp"
#include "tsglyph/common.hpp"
#include "tsglyph/receptive.hpp"

namespace tsglyph {

struct GlobalExplanation {
    int class_id = 0;
    FeatureKey key;
    double coefficient = 0.0;
    double importance = 0.0;       // |w_j| / sum of |w| over the task's nonzeros
    std::vector<double> segment;   // decoded waveform of the subsequence
    int t_start = 0, t_end = 0;    // span of the segment in the canonical series
};

struct OccurrenceSpan {
    FeatureKey key;
    double coefficient = 0.0;
    int position = 0;              // representation index where the occurrence starts
    int t_start = 0, t_end = 0;    // input-space pre-image, clamped to [0, T-1]
};

struct LocalExplanation {
    int instance_id = 0;
    int predicted_class = 0;
    std::vector<double> series;
    std::vector<OccurrenceSpan> spans;
    bool bias_only = false;        // no selected subsequence present in the instance
};

namespace detail {

inline const TrainedModel& model_for_depth(const std::vector<TrainedModel>& models, int depth) {
    for (const auto& m : models)
        if (m.config.depth == depth) return m;
    throw ArgumentError("no trained model for depth " + std::to_string(depth));
}

inline const BinaryPipeline& task_for_class(const MultiDepthClassifier& clf, int class_id) {
    if (clf.class_count == 2) return clf.tasks[0];
    for (const auto& t : clf.tasks)
        if (t.positive_class == class_id) return t;
    throw ArgumentError("no classifier task for class " + std::to_string(class_id));
}

// Whether the coefficient votes for the class (binary: class 0 is the
// negative side of the single task).
inline bool votes_for(const MultiDepthClassifier& clf, int class_id, double w) {
    if (clf.class_count == 2 && class_id == 0) return w < 0.0;
    return w > 0.0;
}

}  // namespace detail

inline std::vector<GlobalExplanation> explain_global(const std::vector<TrainedModel>& models,
                                                     const MultiDepthClassifier& clf,
                                                     int class_id, int top_n) {
    const auto& task = detail::task_for_class(clf, class_id);
    double abs_sum = 0.0;
    for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j)
        abs_sum += std::abs(task.final_model.w(j));

    std::vector<GlobalExplanation> out;
    for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j) {
        const double wj = task.final_model.w(j);
        if (wj == 0.0 || !detail::votes_for(clf, class_id, wj)) continue;
        GlobalExplanation g;
        g.class_id = class_id;
        g.key = task.features[static_cast<size_t>(j)];
        g.coefficient = wj;
        g.importance = abs_sum > 0.0 ? std::abs(wj) / abs_sum : 0.0;
        out.push_back(std::move(g));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::abs(a.coefficient) != std::abs(b.coefficient)
                   ? std::abs(a.coefficient) > std::abs(b.coefficient)
                   : a.key < b.key;
    });
    if (out.empty()) {
        std::cerr << "notice: class " << class_id << " has no features voting for it\n";
        return out;
    }
    if (top_n < static_cast<int>(out.size())) out.resize(static_cast<size_t>(std::max(top_n, 0)));

    for (auto& g : out) {
        const auto& model = detail::model_for_depth(models, g.key.depth);
        const int T = model.trained_length;
        SymbolicRepresentation rep;
        rep.depth = g.key.depth;
        rep.source_length = T;
        rep.phases = canonical_phases(T, g.key.depth);
        rep.indices.assign(static_cast<size_t>(repr_length(T, g.key.depth)), 0);
        const int len = static_cast<int>(g.key.subseq.size());
        const int pos = (static_cast<int>(rep.indices.size()) - len) / 2;
        for (int i = 0; i < len; ++i)
            rep.indices[static_cast<size_t>(pos + i)] = parse_symbol(g.key.subseq[static_cast<size_t>(i)]);
        const auto pd = decode_partial(model, rep, pos, pos + len - 1);
        g.segment = pd.segment;
        g.t_start = pd.t_start;
        g.t_end = pd.t_end;
    }
    return out;
}

inline LocalExplanation explain_local(const std::vector<TrainedModel>& models,
                                      const MultiDepthClassifier& clf,
                                      const std::vector<double>& series, int instance_id = 0) {
    LocalExplanation expl;
    expl.instance_id = instance_id;
    expl.series = series;

    std::vector<SymbolicRepresentation> reps;
    std::vector<FeatureVector> per_depth;
    for (const auto& dict : clf.dictionaries) {
        const auto& model = detail::model_for_depth(models, dict.depth);
        reps.push_back(represent(model, series));
        per_depth.push_back(extract(reps.back(), dict));
    }
    expl.predicted_class = predict(clf, per_depth);

    const auto& task = clf.class_count == 2 ? clf.tasks[0]
                                            : detail::task_for_class(clf, expl.predicted_class);
    const long T = static_cast<long>(series.size());
    for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j) {
        const double wj = task.final_model.w(j);
        if (wj == 0.0) continue;
        const auto& key = task.features[static_cast<size_t>(j)];
        const SymbolicRepresentation* rep = nullptr;
        for (size_t di = 0; di < clf.dictionaries.size(); ++di)
            if (clf.dictionaries[di].depth == key.depth) rep = &reps[di];
        if (!rep) continue;
        const std::string symbols = rep->to_string();
        const auto geom = LayerGeometry::encoder(key.depth);
        for (size_t p = 0; symbols.size() >= key.subseq.size() &&
                           p + key.subseq.size() <= symbols.size(); ++p) {
            if (symbols.compare(p, key.subseq.size(), key.subseq) != 0) continue;
            const auto pre = preimage(geom, static_cast<long>(p),
                                      static_cast<long>(p + key.subseq.size() - 1), T);
            expl.spans.push_back({key, wj, static_cast<int>(p),
                                  static_cast<int>(pre.start), static_cast<int>(pre.end)});
        }
    }
    if (expl.spans.empty()) {
        expl.bias_only = true;
        std::cerr << "notice: instance " << instance_id
                  << " contains no selected subsequence; decision is bias-only\n";
    }
    return expl;
}

// ----------------------------------------------------------------------------
// Rendering (deterministic byte output)
// ----------------------------------------------------------------------------
namespace detail {

inline std::string fixed(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4f", v == 0.0 ? 0.0 : v);  // normalize -0
    return buf;
}

struct SpanMark {
    int t_start, t_end;
};

inline void write_series_svg(const std::vector<double>& series,
                             const std::vector<SpanMark>& spans, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write SVG file: " + path);
    const double W = 800.0, H = 300.0, margin = 20.0;
    const auto n = series.size();
    double lo = series.empty() ? 0.0 : series[0], hi = lo;
    for (double v : series) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi - lo < 1e-12) hi = lo + 1.0;
    auto sx = [&](double t) { return margin + (W - 2 * margin) * (n > 1 ? t / (n - 1.0) : 0.0); };
    auto sy = [&](double v) { return H - margin - (H - 2 * margin) * (v - lo) / (hi - lo); };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n"
        << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    for (const auto& span : spans)
        out << "<rect x=\"" << fixed(sx(span.t_start)) << "\" y=\"" << fixed(margin)
            << "\" width=\"" << fixed(sx(span.t_end) - sx(span.t_start)) << "\" height=\""
            << fixed(H - 2 * margin) << "\" fill=\"#ffcc66\" fill-opacity=\"0.5\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
    for (size_t t = 0; t < n; ++t)
        out << (t ? " " : "") << fixed(sx(static_cast<double>(t))) << ',' << fixed(sy(series[t]));
    out << "\"/>\n</svg>\n";
}

inline void write_series_csv(const std::vector<double>& series,
                             const std::vector<SpanMark>& spans, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write CSV file: " + path);
    out << "t,value,highlighted\n";
    char buf[40];
    for (size_t t = 0; t < series.size(); ++t) {
        int hl = 0;
        for (const auto& span : spans)
            if (static_cast<int>(t) >= span.t_start && static_cast<int>(t) <= span.t_end) hl = 1;
        std::snprintf(buf, sizeof buf, "%.17g", series[t]);
        out << t << ',' << buf << ',' << hl << '\n';
    }
}

}  // namespace detail

// Writes `stem`.svg and `stem`.csv.
inline void render(const LocalExplanation& expl, const std::string& stem) {
    std::vector<detail::SpanMark> spans;
    for (const auto& s : expl.spans) spans.push_back({s.t_start, s.t_end});
    detail::write_series_svg(expl.series, spans, stem + ".svg");
    detail::write_series_csv(expl.series, spans, stem + ".csv");
}

inline void render(const GlobalExplanation& expl, const std::string& stem) {
    const std::vector<detail::SpanMark> spans = {{0, static_cast<int>(expl.segment.size()) - 1}};
    detail::write_series_svg(expl.segment, spans, stem + ".svg");
    detail::write_series_csv(expl.segment, spans, stem + ".csv");
}

// ----------------------------------------------------------------------------
// JSON report bundling
// ----------------------------------------------------------------------------
inline nlohmann::json explanation_to_json(const GlobalExplanation& g) {
    return {{"class", g.class_id},
            {"depth", g.key.depth},
            {"subsequence", g.key.subseq},
            {"coefficient", g.coefficient},
            {"importance", g.importance},
            {"t_start", g.t_start},
            {"t_end", g.t_end},
            {"segment", g.segment}};
}

inline nlohmann::json explanation_to_json(const LocalExplanation& l) {
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : l.spans)
        spans.push_back({{"depth", s.key.depth},
                         {"subsequence", s.key.subseq},
                         {"coefficient", s.coefficient},
                         {"position", s.position},
                         {"t_start", s.t_start},
                         {"t_end", s.t_end}});
    return {{"instance", l.instance_id},
            {"predicted_class", l.predicted_class},
            {"bias_only", l.bias_only},
            {"spans", spans}};
}

}  // namespace tsglyph
