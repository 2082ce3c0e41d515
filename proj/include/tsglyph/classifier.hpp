// ============================================================================
// classifier.hpp - elastic-net penalized logistic regression and the
// multi-depth feature aggregation pipeline
//
// Objective, with lambda on the data term:
//   F(w,b) = (1-rho)/2 w'w + rho ||w||_1
//            + lambda sum_i log(1 + exp(-y_i (h_i'w + b)))
// solved by FISTA with backtracking; the L1 proximal step produces exact
// zeros. Multiclass problems run the whole pipeline One-vs-All.
// ============================================================================

#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tsglyph/common.hpp"
#include "tsglyph/features.hpp"

namespace tsglyph {

struct ElasticNetLogit {
    Vector w;
    double b = 0.0;
    double lambda = 1.0;
    double rho = 1.0;

    double decision(const Eigen::Ref<const Vector>& h) const { return h.dot(w) + b; }
    int nonzero_count() const {
        int n = 0;
        for (Eigen::Index j = 0; j < w.size(); ++j)
            if (w(j) != 0.0) ++n;
        return n;
    }
};

namespace detail {

inline double softplus(double z) {
    return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace detail

inline double logit_objective(const Eigen::MatrixXd& X, const Vector& y, const Vector& w,
                              double b, double lambda, double rho) {
    double obj = 0.5 * (1.0 - rho) * w.squaredNorm() + rho * w.lpNorm<1>();
    const Vector margins = X * w + Vector::Constant(X.rows(), b);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        obj += lambda * detail::softplus(-y(i) * margins(i));
    return obj;
}

// FISTA with backtracking and restart; bias unpenalized.
inline ElasticNetLogit fit_logit(const Eigen::MatrixXd& X, const Vector& y, double lambda,
                                 double rho, double tol = 1e-10, int max_iter = 20000) {
    const Eigen::Index N = X.rows(), d = X.cols();
    if (N < 2) throw ArgumentError("fit_logit: need at least 2 instances");
    bool has_pos = false, has_neg = false;
    for (Eigen::Index i = 0; i < N; ++i) (y(i) > 0 ? has_pos : has_neg) = true;
    if (!has_pos || !has_neg) throw ArgumentError("fit_logit: degenerate single-class labels");
    if (rho < 0.0 || rho > 1.0) throw ArgumentError("fit_logit: rho must be in [0,1]");

    // smooth part: (1-rho)/2 w'w + lambda * logistic losses
    auto smooth = [&](const Vector& w, double b) {
        double val = 0.5 * (1.0 - rho) * w.squaredNorm();
        const Vector margins = X * w + Vector::Constant(N, b);
        for (Eigen::Index i = 0; i < N; ++i) val += lambda * detail::softplus(-y(i) * margins(i));
        return val;
    };
    auto smooth_grad = [&](const Vector& w, double b, Vector& gw, double& gb) {
        const Vector margins = X * w + Vector::Constant(N, b);
        Vector r(N);
        for (Eigen::Index i = 0; i < N; ++i)
            r(i) = -y(i) / (1.0 + std::exp(y(i) * margins(i)));
        gw = (1.0 - rho) * w + lambda * (X.transpose() * r);
        gb = lambda * r.sum();
    };
    auto prox = [&](const Vector& v, double step) {
        Vector out(v.size());
        const double thr = step * rho;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            const double a = v(j);
            out(j) = a > thr ? a - thr : (a < -thr ? a + thr : 0.0);
        }
        return out;
    };

    Vector w = Vector::Zero(d), w_prev = w, v = w;
    double b = 0.0, b_prev = 0.0, vb = 0.0;
    double t = 1.0;
    double L = 1.0 + 0.25 * lambda * static_cast<double>(N);  // refined by backtracking
    double obj_prev = logit_objective(X, y, w, b, lambda, rho);

    for (int iter = 0; iter < max_iter; ++iter) {
        Vector gw;
        double gb;
        smooth_grad(v, vb, gw, gb);
        const double f_v = smooth(v, vb);

        Vector w_new;
        double b_new;
        for (;;) {
            w_new = prox(v - gw / L, 1.0 / L);
            b_new = vb - gb / L;
            const Vector dw = w_new - v;
            const double db = b_new - vb;
            const double quad = f_v + gw.dot(dw) + gb * db +
                                0.5 * L * (dw.squaredNorm() + db * db);
            if (smooth(w_new, b_new) <= quad + 1e-12 * std::abs(quad)) break;
            L *= 2.0;
            if (L > 1e15) break;
        }

        const double obj = logit_objective(X, y, w_new, b_new, lambda, rho);
        if (obj > obj_prev) {
            // restart momentum from the last accepted point
            v = w;
            vb = b;
            t = 1.0;
            L *= 2.0;
            if (L > 1e15) break;
            continue;
        }

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        v = w_new + ((t - 1.0) / t_next) * (w_new - w);
        vb = b_new + ((t - 1.0) / t_next) * (b_new - b);
        w_prev = w;
        b_prev = b;
        w = w_new;
        b = b_new;
        t = t_next;

        if (std::abs(obj_prev - obj) < tol * std::max(1.0, std::abs(obj))) {
            obj_prev = obj;
            break;
        }
        obj_prev = obj;
        L *= 0.95;  // allow the step size to grow back
    }

    ElasticNetLogit model;
    model.w = w;
    model.b = b;
    model.lambda = lambda;
    model.rho = rho;
    return model;
}

// ----------------------------------------------------------------------------
// Cross-validation
// ----------------------------------------------------------------------------
inline std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 6; ++i) grid.push_back(std::pow(10.0, -2.0 + i));
    return grid;
}

inline double accuracy(const ElasticNetLogit& model, const Eigen::MatrixXd& X, const Vector& y) {
    int correct = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        if ((model.decision(X.row(i).transpose()) > 0.0) == (y(i) > 0.0)) ++correct;
    return static_cast<double>(correct) / static_cast<double>(X.rows());
}

// Stratified k-fold with k = min(5, smallest class count). Ties prefer the
// sparser fit: larger rho first, then smaller lambda (stronger penalty
// relative to the data term).
inline std::pair<double, double> cross_validate(const Eigen::MatrixXd& X, const Vector& y,
                                                const std::vector<double>& lambda_grid,
                                                const std::vector<double>& rho_grid,
                                                std::uint64_t seed = 0) {
    if (lambda_grid.empty() || rho_grid.empty())
        throw ArgumentError("cross_validate: empty grid");
    std::vector<Eigen::Index> pos, neg;
    for (Eigen::Index i = 0; i < y.size(); ++i) (y(i) > 0 ? pos : neg).push_back(i);
    const size_t min_count = std::min(pos.size(), neg.size());
    if (min_count < 2) throw ArgumentError("cross_validate: a class has fewer than 2 members");
    const int k = static_cast<int>(std::min<size_t>(5, min_count));

    Rng rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);
    std::vector<int> fold_of(static_cast<size_t>(y.size()));
    for (size_t i = 0; i < pos.size(); ++i) fold_of[static_cast<size_t>(pos[i])] = static_cast<int>(i % k);
    for (size_t i = 0; i < neg.size(); ++i) fold_of[static_cast<size_t>(neg[i])] = static_cast<int>(i % k);

    double best_acc = -1.0;
    std::pair<double, double> best{lambda_grid.front(), rho_grid.front()};

    std::vector<double> rhos = rho_grid;
    std::sort(rhos.begin(), rhos.end(), std::greater<>());
    std::vector<double> lambdas = lambda_grid;
    std::sort(lambdas.begin(), lambdas.end());

    for (double rho : rhos) {
        for (double lambda : lambdas) {
            double acc_sum = 0.0;
            for (int fold = 0; fold < k; ++fold) {
                std::vector<Eigen::Index> tr, va;
                for (Eigen::Index i = 0; i < y.size(); ++i)
                    (fold_of[static_cast<size_t>(i)] == fold ? va : tr).push_back(i);
                Eigen::MatrixXd Xtr(tr.size(), X.cols()), Xva(va.size(), X.cols());
                Vector ytr(tr.size()), yva(va.size());
                for (size_t i = 0; i < tr.size(); ++i) {
                    Xtr.row(static_cast<Eigen::Index>(i)) = X.row(tr[i]);
                    ytr(static_cast<Eigen::Index>(i)) = y(tr[i]);
                }
                for (size_t i = 0; i < va.size(); ++i) {
                    Xva.row(static_cast<Eigen::Index>(i)) = X.row(va[i]);
                    yva(static_cast<Eigen::Index>(i)) = y(va[i]);
                }
                const auto model = fit_logit(Xtr, ytr, lambda, rho, 1e-8, 4000);
                acc_sum += accuracy(model, Xva, yva);
            }
            const double mean_acc = acc_sum / k;
            if (mean_acc > best_acc + 1e-12) {
                best_acc = mean_acc;
                best = {lambda, rho};
            }
        }
    }
    return best;
}

// ----------------------------------------------------------------------------
// Multi-depth aggregation (three-step pipeline, One-vs-All for C > 2)
// ----------------------------------------------------------------------------
struct FeatureKey {
    int depth = 0;
    std::string subseq;
    auto operator<=>(const FeatureKey&) const = default;
};

struct LedgerEntry {
    int class_id = 0;  // OvA positive class
    FeatureKey key;
    double coefficient = 0.0;  // step-1 per-depth coefficient
};

struct DepthFeatures {
    FeatureDictionary dict;
    Eigen::MatrixXd X;  // [N x dict.size()] presence bits
};

struct BinaryPipeline {
    int positive_class = 1;
    std::vector<FeatureKey> features;  // columns of the final model
    ElasticNetLogit final_model;
    bool fallback_single_depth = false;
};

struct MultiDepthClassifier {
    int class_count = 2;
    std::vector<FeatureDictionary> dictionaries;  // per depth, index 0 = depth 1
    std::vector<BinaryPipeline> tasks;            // one for C == 2, else C
    std::vector<LedgerEntry> ledger;
    int n_features_initial = 0;

    int n_features_final() const {
        std::set<FeatureKey> used;
        for (const auto& task : tasks)
            for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j)
                if (task.final_model.w(j) != 0.0) used.insert(task.features[static_cast<size_t>(j)]);
        return static_cast<int>(used.size());
    }
};

struct FitOptions {
    std::vector<double> lambda_grid = default_lambda_grid();
    std::vector<double> rho_grid_step1{0.8, 0.9, 1.0};  // strong L1 prior
    std::vector<double> rho_grid_final{0.5, 0.8, 0.9, 1.0};
    std::uint64_t seed = 0;
};

namespace detail {

inline Vector ova_labels(const std::vector<int>& labels, int positive_class) {
    Vector y(static_cast<Eigen::Index>(labels.size()));
    for (size_t i = 0; i < labels.size(); ++i)
        y(static_cast<Eigen::Index>(i)) = labels[i] == positive_class ? 1.0 : -1.0;
    return y;
}

inline BinaryPipeline fit_binary_pipeline(const std::vector<DepthFeatures>& depths,
                                          const Vector& y, int positive_class,
                                          const FitOptions& opts,
                                          std::vector<LedgerEntry>& ledger) {
    BinaryPipeline task;
    task.positive_class = positive_class;

    // Step 1: per-depth penalized fits; Step 2: union of nonzero features.
    std::vector<FeatureKey> selected;
    double best_depth_acc = -1.0;
    ElasticNetLogit best_depth_model;
    std::vector<FeatureKey> best_depth_features;
    for (size_t di = 0; di < depths.size(); ++di) {
        const auto& df = depths[di];
        const auto [lambda, rho] =
            cross_validate(df.X, y, opts.lambda_grid, opts.rho_grid_step1,
                           opts.seed + 1000 * di + static_cast<std::uint64_t>(positive_class));
        const auto model = fit_logit(df.X, y, lambda, rho);
        std::vector<FeatureKey> depth_features;
        for (Eigen::Index j = 0; j < model.w.size(); ++j) {
            const FeatureKey key{df.dict.depth, df.dict.subsequences[static_cast<size_t>(j)]};
            depth_features.push_back(key);
            if (model.w(j) != 0.0) {
                selected.push_back(key);
                ledger.push_back({positive_class, key, model.w(j)});
            }
        }
        const double acc = accuracy(model, df.X, y);
        if (acc > best_depth_acc) {
            best_depth_acc = acc;
            best_depth_model = model;
            best_depth_features = depth_features;
        }
    }

    if (selected.empty()) {
        std::cerr << "warning: no features selected in step 1; "
                     "falling back to the best single-depth model\n";
        task.features = best_depth_features;
        task.final_model = best_depth_model;
        task.fallback_single_depth = true;
        return task;
    }

    // Step 3: final penalized fit on the aggregated set.
    std::sort(selected.begin(), selected.end());
    task.features = selected;
    Eigen::MatrixXd Xagg(y.size(), static_cast<Eigen::Index>(selected.size()));
    for (size_t j = 0; j < selected.size(); ++j) {
        const auto& key = selected[j];
        for (const auto& df : depths) {
            if (df.dict.depth != key.depth) continue;
            const auto it = std::lower_bound(df.dict.subsequences.begin(),
                                             df.dict.subsequences.end(), key.subseq);
            Xagg.col(static_cast<Eigen::Index>(j)) =
                df.X.col(it - df.dict.subsequences.begin());
            break;
        }
    }
    const auto [lambda, rho] =
        cross_validate(Xagg, y, opts.lambda_grid, opts.rho_grid_final,
                       opts.seed + 77 + static_cast<std::uint64_t>(positive_class));
    task.final_model = fit_logit(Xagg, y, lambda, rho);
    return task;
}

}  // namespace detail

inline MultiDepthClassifier fit_multidepth(const std::vector<DepthFeatures>& depths,
                                           const std::vector<int>& labels, int class_count,
                                           const FitOptions& opts = {}) {
    if (depths.empty()) throw ArgumentError("fit_multidepth: no depths");
    if (class_count < 2) throw ArgumentError("fit_multidepth: need at least 2 classes");

    MultiDepthClassifier clf;
    clf.class_count = class_count;
    for (const auto& df : depths) {
        clf.dictionaries.push_back(df.dict);
        clf.n_features_initial += df.dict.size();
    }

    if (class_count == 2) {
        clf.tasks.push_back(detail::fit_binary_pipeline(
            depths, detail::ova_labels(labels, 1), 1, opts, clf.ledger));
    } else {
        for (int c = 0; c < class_count; ++c)
            clf.tasks.push_back(detail::fit_binary_pipeline(
                depths, detail::ova_labels(labels, c), c, opts, clf.ledger));
    }
    return clf;
}

// ----------------------------------------------------------------------------
// Prediction and explanation
// ----------------------------------------------------------------------------
namespace detail {

// bit of (depth, subseq) in the per-depth feature vectors of one instance
inline double feature_bit(const MultiDepthClassifier& clf,
                          const std::vector<FeatureVector>& per_depth, const FeatureKey& key) {
    for (size_t di = 0; di < clf.dictionaries.size(); ++di) {
        const auto& dict = clf.dictionaries[di];
        if (dict.depth != key.depth) continue;
        const auto it =
            std::lower_bound(dict.subsequences.begin(), dict.subsequences.end(), key.subseq);
        if (it == dict.subsequences.end() || *it != key.subseq) return 0.0;
        return per_depth[di].bits[static_cast<size_t>(it - dict.subsequences.begin())];
    }
    return 0.0;
}

inline double task_decision(const MultiDepthClassifier& clf, const BinaryPipeline& task,
                            const std::vector<FeatureVector>& per_depth) {
    Vector h(static_cast<Eigen::Index>(task.features.size()));
    for (size_t j = 0; j < task.features.size(); ++j)
        h(static_cast<Eigen::Index>(j)) = feature_bit(clf, per_depth, task.features[j]);
    return task.final_model.decision(h);
}

}  // namespace detail

inline int predict(const MultiDepthClassifier& clf, const std::vector<FeatureVector>& per_depth) {
    if (per_depth.size() != clf.dictionaries.size())
        throw ArgumentError("predict: expected one feature vector per depth");
    for (size_t di = 0; di < per_depth.size(); ++di)
        if (per_depth[di].depth != clf.dictionaries[di].depth ||
            per_depth[di].bits.size() != static_cast<size_t>(clf.dictionaries[di].size()))
            throw ArgumentError("predict: feature vector misaligned with dictionary");

    if (clf.class_count == 2)
        return detail::task_decision(clf, clf.tasks[0], per_depth) > 0.0 ? 1 : 0;

    int best_class = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const auto& task : clf.tasks) {
        const double score = detail::task_decision(clf, task, per_depth);
        if (score > best_score) {
            best_score = score;
            best_class = task.positive_class;
        }
    }
    return best_class;
}

struct FeatureContribution {
    FeatureKey key;
    double coefficient = 0.0;
    double relative_importance = 0.0;  // |w_j| / sum_k |w_k| over the task's nonzeros
    bool active = false;               // present in the instance
};

// Contributions for the task that decided the label (OvA winner for C > 2).
inline std::vector<FeatureContribution> explain(const MultiDepthClassifier& clf,
                                                const std::vector<FeatureVector>& per_depth) {
    const int label = predict(clf, per_depth);
    const BinaryPipeline* task = &clf.tasks[0];
    for (const auto& t : clf.tasks)
        if (t.positive_class == label && clf.class_count > 2) task = &t;

    double abs_sum = 0.0;
    for (Eigen::Index j = 0; j < task->final_model.w.size(); ++j)
        abs_sum += std::abs(task->final_model.w(j));

    std::vector<FeatureContribution> out;
    for (Eigen::Index j = 0; j < task->final_model.w.size(); ++j) {
        const double wj = task->final_model.w(j);
        if (wj == 0.0) continue;
        FeatureContribution c;
        c.key = task->features[static_cast<size_t>(j)];
        c.coefficient = wj;
        c.relative_importance = abs_sum > 0.0 ? std::abs(wj) / abs_sum : 0.0;
        c.active = detail::feature_bit(clf, per_depth, c.key) > 0.5;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::abs(a.coefficient) > std::abs(b.coefficient);
    });
    return out;
}

// ----------------------------------------------------------------------------
// Serialization
// ----------------------------------------------------------------------------
inline nlohmann::json classifier_to_json(const MultiDepthClassifier& clf) {
    nlohmann::json j;
    j["magic"] = "tsglyph-classifier";
    j["format_version"] = 1;
    j["class_count"] = clf.class_count;
    j["n_features_initial"] = clf.n_features_initial;
    j["dictionaries"] = nlohmann::json::array();
    for (const auto& dict : clf.dictionaries)
        j["dictionaries"].push_back({{"depth", dict.depth}, {"subsequences", dict.subsequences}});
    j["tasks"] = nlohmann::json::array();
    for (const auto& task : clf.tasks) {
        nlohmann::json tj;
        tj["positive_class"] = task.positive_class;
        tj["fallback_single_depth"] = task.fallback_single_depth;
        tj["features"] = nlohmann::json::array();
        for (const auto& key : task.features)
            tj["features"].push_back({{"depth", key.depth}, {"subseq", key.subseq}});
        tj["w"] = std::vector<double>(task.final_model.w.data(),
                                      task.final_model.w.data() + task.final_model.w.size());
        tj["b"] = task.final_model.b;
        tj["lambda"] = task.final_model.lambda;
        tj["rho"] = task.final_model.rho;
        j["tasks"].push_back(tj);
    }
    j["ledger"] = nlohmann::json::array();
    for (const auto& entry : clf.ledger)
        j["ledger"].push_back({{"class", entry.class_id},
                               {"depth", entry.key.depth},
                               {"subseq", entry.key.subseq},
                               {"coefficient", entry.coefficient}});
    return j;
}

inline MultiDepthClassifier classifier_from_json(const nlohmann::json& j) {
    if (!j.contains("magic") || j.at("magic") != "tsglyph-classifier")
        throw FormatError("not a tsglyph classifier file");
    MultiDepthClassifier clf;
    clf.class_count = j.at("class_count");
    clf.n_features_initial = j.at("n_features_initial");
    for (const auto& dj : j.at("dictionaries")) {
        FeatureDictionary dict;
        dict.depth = dj.at("depth");
        dict.subsequences = dj.at("subsequences").get<std::vector<std::string>>();
        clf.dictionaries.push_back(std::move(dict));
    }
    for (const auto& tj : j.at("tasks")) {
        BinaryPipeline task;
        task.positive_class = tj.at("positive_class");
        task.fallback_single_depth = tj.at("fallback_single_depth");
        for (const auto& fj : tj.at("features"))
            task.features.push_back({fj.at("depth").get<int>(), fj.at("subseq").get<std::string>()});
        const auto w = tj.at("w").get<std::vector<double>>();
        task.final_model.w = Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size()));
        task.final_model.b = tj.at("b");
        task.final_model.lambda = tj.at("lambda");
        task.final_model.rho = tj.at("rho");
        clf.tasks.push_back(std::move(task));
    }
    for (const auto& lj : j.at("ledger"))
        clf.ledger.push_back({lj.at("class").get<int>(),
                              {lj.at("depth").get<int>(), lj.at("subseq").get<std::string>()},
                              lj.at("coefficient").get<double>()});
    return clf;
}

inline void save_classifier(const MultiDepthClassifier& clf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write classifier file: " + path);
    out << classifier_to_json(clf).dump(2) << '\n';
}

inline MultiDepthClassifier load_classifier(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open classifier file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        return classifier_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("corrupt classifier file " + path + ": " + e.what());
    }
}

// Coefficient table matching the report layout: depth, subsequence,
// coefficient, relative importance.
inline void save_coefficient_table(const MultiDepthClassifier& clf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write coefficient table: " + path);
    out << "class,depth,subsequence,coefficient,relative_importance\n";
    char buf[64];
    for (const auto& task : clf.tasks) {
        double abs_sum = 0.0;
        for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j)
            abs_sum += std::abs(task.final_model.w(j));
        for (Eigen::Index j = 0; j < task.final_model.w.size(); ++j) {
            const double wj = task.final_model.w(j);
            if (wj == 0.0) continue;
            const auto& key = task.features[static_cast<size_t>(j)];
            std::snprintf(buf, sizeof buf, "%.6f,%.4f", wj, abs_sum > 0 ? std::abs(wj) / abs_sum : 0.0);
            out << task.positive_class << ',' << key.depth << ',' << key.subseq << ',' << buf << '\n';
        }
    }
}

}  // namespace tsglyph
