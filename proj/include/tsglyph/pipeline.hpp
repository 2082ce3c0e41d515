// ============================================================================
// pipeline.hpp - end-to-end driver: per-depth training, symbolic encoding,
// multi-depth feature aggregation and classification, plus summary metrics.
// Shared by the command-line front end and the acceptance suite.
// ============================================================================

#pragma once

#include <string>
#include <vector>

#include "tsglyph/autoencoder.hpp"
#include "tsglyph/classifier.hpp"
#include "tsglyph/dataset.hpp"
#include "tsglyph/features.hpp"

namespace tsglyph {

struct PipelineConfig {
    ModelConfig model;        // per-depth template; `depth` is overridden
    int depths = 5;           // requested D, auto-capped by series length
    FitOptions fit;
    bool znorm = true;
};

struct PipelineResult {
    std::vector<TrainedModel> models;                            // index 0 = depth 1
    std::vector<std::vector<SymbolicRepresentation>> train_reps;  // [depth][instance]
    std::vector<std::vector<SymbolicRepresentation>> test_reps;
    MultiDepthClassifier clf;
    std::vector<int> train_predictions, test_predictions;
    double train_acc = 0.0, test_acc = 0.0;
    int depths_used = 0;
};

inline int capped_depths(const TimeSeriesDataset& ds, int requested, int min_repr_length) {
    const int T = static_cast<int>(ds.train.front().values.size());
    const int cap = max_depth(T, min_repr_length);
    if (requested > cap)
        std::cerr << "warning: depth " << requested << " capped to " << cap
                  << " for series length " << T << '\n';
    return std::min(requested, cap);
}

inline std::vector<TrainedModel> train_depths(const TimeSeriesDataset& ds,
                                              const PipelineConfig& cfg) {
    if (cfg.depths < 1) throw ArgumentError("depths must be >= 1");
    const int D = capped_depths(ds, cfg.depths, cfg.model.min_repr_length);
    // depths are independent and individually seeded, so they fan out onto
    // worker threads without affecting results
    std::vector<TrainedModel> models(static_cast<size_t>(D));
    parallel_for(D, [&](int i) {
        ModelConfig mc = cfg.model;
        mc.depth = i + 1;
        models[static_cast<size_t>(i)] = train(ds, mc);
    });
    return models;
}

inline std::vector<SymbolicRepresentation> encode_split(const TrainedModel& model,
                                                        const std::vector<TimeSeries>& split) {
    std::vector<SymbolicRepresentation> reps;
    reps.reserve(split.size());
    for (const auto& ts : split) reps.push_back(represent(model, ts.values));
    return reps;
}

inline std::vector<FeatureVector> extract_split(const std::vector<SymbolicRepresentation>& reps,
                                                const FeatureDictionary& dict) {
    std::vector<FeatureVector> out;
    out.reserve(reps.size());
    for (const auto& rep : reps) out.push_back(extract(rep, dict));
    return out;
}

inline PipelineResult run_pipeline(TimeSeriesDataset ds, const PipelineConfig& cfg) {
    if (cfg.znorm) znormalize(ds);
    PipelineResult res;
    res.models = train_depths(ds, cfg);
    res.depths_used = static_cast<int>(res.models.size());

    std::vector<int> labels;
    for (const auto& ts : ds.train) labels.push_back(ts.label);

    std::vector<DepthFeatures> depth_features;
    for (const auto& model : res.models) {
        res.train_reps.push_back(encode_split(model, ds.train));
        res.test_reps.push_back(encode_split(model, ds.test));
        DepthFeatures df;
        df.dict = build_dictionary(res.train_reps.back());
        const auto fvs = extract_split(res.train_reps.back(), df.dict);
        df.X.resize(static_cast<Eigen::Index>(fvs.size()), df.dict.size());
        for (size_t i = 0; i < fvs.size(); ++i)
            for (int j = 0; j < df.dict.size(); ++j)
                df.X(static_cast<Eigen::Index>(i), j) = fvs[i].bits[static_cast<size_t>(j)];
        depth_features.push_back(std::move(df));
    }

    res.clf = fit_multidepth(depth_features, labels, ds.class_count, cfg.fit);

    auto evaluate = [&](const std::vector<TimeSeries>& split,
                        const std::vector<std::vector<SymbolicRepresentation>>& reps,
                        std::vector<int>& predictions) {
        int correct = 0;
        for (size_t i = 0; i < split.size(); ++i) {
            std::vector<FeatureVector> per_depth;
            for (size_t d = 0; d < res.models.size(); ++d)
                per_depth.push_back(extract(reps[d][i], depth_features[d].dict));
            const int label = predict(res.clf, per_depth);
            predictions.push_back(label);
            if (label == split[i].label) ++correct;
        }
        return split.empty() ? 0.0 : static_cast<double>(correct) / split.size();
    };
    res.train_acc = evaluate(ds.train, res.train_reps, res.train_predictions);
    res.test_acc = evaluate(ds.test, res.test_reps, res.test_predictions);
    return res;
}

}  // namespace tsglyph
