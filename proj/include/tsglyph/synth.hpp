// ============================================================================
// synth.hpp - seeded synthetic dataset generators
//
// Stand-ins for common benchmark dataset families when no archive data is
// available locally: two-class motion profiles, noise-vs-shapelet, smooth
// spectra, and heartbeat-like multi-class traces. Every generator is fully
// deterministic in its seed. The shapelet generator also reports the true
// injected-pattern span per test instance so interpretability overlap can be
// checked against ground truth.
// ============================================================================

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "tsglyph/common.hpp"
#include "tsglyph/dataset.hpp"

namespace tsglyph {

namespace detail {

inline double bump(double t, double center, double width) {
    const double u = (t - center) / width;
    return std::exp(-0.5 * u * u);
}

inline double ramp(double t, double onset, double scale) {
    return 1.0 / (1.0 + std::exp(-(t - onset) / scale));
}

}  // namespace detail

// Two-class motion-profile set: both classes share a central bell, the
// classes differ in onset ramp, peak sharpness and a post-peak dip.
inline TimeSeriesDataset gunpoint_like(std::uint64_t seed, int n_train = 50, int n_test = 100,
                                       int T = 150) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.06);

    // Class cues are individually unreliable (each absent in a fraction of
    // instances) so no single symbolic feature separates the classes alone.
    auto make = [&](int label) {
        TimeSeries ts;
        ts.label = label;
        ts.values.resize(static_cast<size_t>(T));
        const double center = 0.5 * T + 7.0 * unif(rng);
        const double width = (label == 0 ? 23.0 : 19.5) + 3.0 * unif(rng);
        const double amp = 1.0 + 0.2 * unif(rng);
        const double dip_center = center + 0.25 * T + 5.0 * unif(rng);
        const double dip_amp = coin(rng) < 0.08 ? 0.0 : 0.40 + 0.20 * unif(rng);
        const double plateau_amp = coin(rng) < 0.08 ? 0.0 : 0.38 + 0.12 * unif(rng);
        const double shoulder = 0.32 + 0.10 * unif(rng);
        for (int t = 0; t < T; ++t) {
            double v = amp * detail::bump(t, center, width);
            if (label == 0) {
                v -= dip_amp * detail::bump(t, dip_center, 8.0);  // re-holster dip
                v += shoulder * detail::bump(t, center - 0.22 * T, 6.0);
            } else {
                v += plateau_amp * detail::ramp(t, center - 0.3 * T, 5.0) *
                     (1.0 - detail::ramp(t, center + 0.3 * T, 5.0));  // pointing plateau
            }
            ts.values[static_cast<size_t>(t)] = v + noise(rng);
        }
        return ts;
    };
    TimeSeriesDataset ds;
    ds.name = "gunpoint_like";
    ds.class_count = 2;
    ds.original_labels = {{0, 0.0}, {1, 1.0}};
    for (int i = 0; i < n_train; ++i) ds.train.push_back(make(i % 2));
    for (int i = 0; i < n_test; ++i) ds.test.push_back(make(i % 2));
    return ds;
}

// Noise-vs-shapelet set: class 0 is pure noise, class 1 hides a triangle at a
// random position. `test_spans[i]` is the triangle's [start, end] within test
// instance i, or {-1, -1} for negative instances.
struct ShapeletDataset {
    TimeSeriesDataset data;
    std::vector<std::pair<int, int>> test_spans;
};

inline ShapeletDataset shapeletsim_like(std::uint64_t seed, int n_train = 40, int n_test = 60,
                                        int T = 256, int triangle_width = 32) {
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, 0.35);
    std::uniform_int_distribution<int> pos_dist(16, T - 16 - triangle_width);

    ShapeletDataset out;
    out.data.name = "shapeletsim_like";
    out.data.class_count = 2;
    out.data.original_labels = {{0, 0.0}, {1, 1.0}};

    auto make = [&](int label, std::pair<int, int>* span) {
        TimeSeries ts;
        ts.label = label;
        ts.values.resize(static_cast<size_t>(T));
        for (int t = 0; t < T; ++t) ts.values[static_cast<size_t>(t)] = noise(rng);
        if (label == 1) {
            const int pos = pos_dist(rng);
            const double half = 0.5 * (triangle_width - 1);
            for (int i = 0; i < triangle_width; ++i)
                ts.values[static_cast<size_t>(pos + i)] +=
                    2.5 * (1.0 - std::abs(i - half) / half);
            if (span) *span = {pos, pos + triangle_width - 1};
        } else if (span) {
            *span = {-1, -1};
        }
        return ts;
    };
    for (int i = 0; i < n_train; ++i) out.data.train.push_back(make(i % 2, nullptr));
    for (int i = 0; i < n_test; ++i) {
        std::pair<int, int> span;
        out.data.test.push_back(make(i % 2, &span));
        out.test_spans.push_back(span);
    }
    return out;
}

// Smooth spectrum-like curves: a fixed bank of absorption peaks whose heights
// depend on the class.
inline TimeSeriesDataset spectra_like(const std::string& name, std::uint64_t seed,
                                      const std::vector<double>& centers,
                                      const std::vector<std::vector<double>>& class_heights,
                                      int n_train = 30, int n_test = 60, int T = 128) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.02);
    const int C = static_cast<int>(class_heights.size());

    auto make = [&](int label) {
        TimeSeries ts;
        ts.label = label;
        ts.values.resize(static_cast<size_t>(T));
        std::vector<double> heights = class_heights[static_cast<size_t>(label)];
        for (double& h : heights) h *= 1.0 + 0.08 * unif(rng);
        for (int t = 0; t < T; ++t) {
            double v = 0.0;
            for (size_t p = 0; p < centers.size(); ++p)
                v += heights[p] * detail::bump(t, centers[p], 7.0);
            ts.values[static_cast<size_t>(t)] = v + noise(rng);
        }
        return ts;
    };
    TimeSeriesDataset ds;
    ds.name = name;
    ds.class_count = C;
    for (int c = 0; c < C; ++c) ds.original_labels[c] = c;
    for (int i = 0; i < n_train; ++i) ds.train.push_back(make(i % C));
    for (int i = 0; i < n_test; ++i) ds.test.push_back(make(i % C));
    return ds;
}

inline TimeSeriesDataset coffee_like(std::uint64_t seed, int n_train = 30, int n_test = 60) {
    return spectra_like("coffee_like", seed, {20, 48, 76, 104},
                        {{1.0, 0.55, 0.85, 0.30}, {0.75, 0.90, 0.55, 0.50}}, n_train, n_test);
}

inline TimeSeriesDataset strawberry_like(std::uint64_t seed, int n_train = 40, int n_test = 80) {
    return spectra_like("strawberry_like", seed, {16, 40, 64, 88, 112},
                        {{0.9, 0.40, 1.0, 0.35, 0.6}, {0.6, 0.75, 0.7, 0.65, 0.4}}, n_train,
                        n_test);
}

// Five-class heartbeat-like traces: a sharp systolic spike plus a slow wave,
// deformed per class.
inline TimeSeriesDataset ecg_like(std::uint64_t seed, int n_train = 50, int n_test = 100,
                                  int T = 140) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 0.03);

    auto make = [&](int label) {
        TimeSeries ts;
        ts.label = label;
        ts.values.resize(static_cast<size_t>(T));
        const double jitter = 2.0 * unif(rng);
        const double spike_c = 30.0 + jitter;
        const double spike_w = label == 1 ? 7.0 : 3.0;          // wide complex
        const double wave_c = (label == 3 ? 95.0 : 75.0) + jitter;  // delayed wave
        const double wave_sign = label == 2 ? -1.0 : 1.0;       // inverted wave
        for (int t = 0; t < T; ++t) {
            double v = 1.8 * detail::bump(t, spike_c, spike_w) -
                       0.4 * detail::bump(t, spike_c - 8.0, 3.0) +
                       wave_sign * 0.7 * detail::bump(t, wave_c, 10.0);
            if (label == 4) v += 0.8 * detail::bump(t, 115.0 + jitter, 5.0);  // ectopic bump
            ts.values[static_cast<size_t>(t)] = v + noise(rng);
        }
        return ts;
    };
    TimeSeriesDataset ds;
    ds.name = "ecg_like";
    ds.class_count = 5;
    for (int c = 0; c < 5; ++c) ds.original_labels[c] = c;
    for (int i = 0; i < n_train; ++i) ds.train.push_back(make(i % 5));
    for (int i = 0; i < n_test; ++i) ds.test.push_back(make(i % 5));
    return ds;
}

}  // namespace tsglyph
