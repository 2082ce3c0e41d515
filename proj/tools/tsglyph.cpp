// ============================================================================
// tsglyph - command-line front door
//
//   tsglyph train      train one model per depth and write a manifest
//   tsglyph encode     emit symbolic representation CSVs per depth
//   tsglyph classify   fit the multi-depth classifier, write metrics
//   tsglyph explain    global (and optionally local) interpretability reports
//   tsglyph benchmark  full pipeline over a dataset list, Markdown + CSV
//   tsglyph sweep      benchmark repeated over codebook sizes
//   tsglyph synth      materialize a synthetic dataset to disk
//
// Exit codes: 0 success, 2 usage/config error, 3 numeric failure.
// ============================================================================

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "tsglyph/interpret.hpp"
#include "tsglyph/pipeline.hpp"
#include "tsglyph/synth.hpp"

namespace fs = std::filesystem;
using namespace tsglyph;

namespace {

struct Options {
    std::string train_path, test_path, dataset_name = "dataset";
    std::string synth_family;
    std::uint64_t synth_seed = 0;
    std::string out_dir = ".";
    std::string models_dir, classifier_path, config_path;
    std::vector<std::string> datasets;
    std::string data_root = "data";
    std::vector<int> codebook_sizes{8, 16, 32};
    int depths = 5;
    int seeds = 1;
    int instance = -1;
    int top_n = 5;
    ModelConfig model;
};

bool is_synth_family(const std::string& family) {
    for (const char* f : {"gunpoint_like", "shapeletsim_like", "coffee_like", "strawberry_like",
                          "ecg_like"})
        if (family == f) return true;
    return false;
}

TimeSeriesDataset make_synth(const std::string& family, std::uint64_t seed) {
    if (family == "gunpoint_like") return gunpoint_like(seed);
    if (family == "shapeletsim_like") return shapeletsim_like(seed).data;
    if (family == "coffee_like") return coffee_like(seed);
    if (family == "strawberry_like") return strawberry_like(seed);
    if (family == "ecg_like") return ecg_like(seed);
    throw ArgumentError("unknown synthetic family: " + family +
                        " (expected gunpoint_like, shapeletsim_like, coffee_like, "
                        "strawberry_like or ecg_like)");
}

TimeSeriesDataset load_input(const Options& opt) {
    if (!opt.synth_family.empty()) return make_synth(opt.synth_family, opt.synth_seed);
    if (opt.train_path.empty() || opt.test_path.empty())
        throw ArgumentError("provide --train and --test files, or --synth FAMILY");
    return load_dataset(opt.train_path, opt.test_path, opt.dataset_name);
}

// Flat key=value config file; unknown keys are an error so typos surface.
void apply_config_file(Options& opt) {
    if (opt.config_path.empty()) return;
    std::ifstream in(opt.config_path);
    if (!in) throw ArgumentError("cannot open config file: " + opt.config_path);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ArgumentError(opt.config_path + ":" + std::to_string(line_no) +
                                ": expected key=value");
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        try {
            if (key == "depths") opt.depths = std::stoi(value);
            else if (key == "seed") opt.model.seed = std::stoull(value);
            else if (key == "codebook_size") opt.model.codebook_size = std::stoi(value);
            else if (key == "latent_dim") opt.model.channels = std::stoi(value);
            else if (key == "beta") opt.model.beta = std::stod(value);
            else if (key == "lr") opt.model.lr = std::stod(value);
            else if (key == "epochs") opt.model.epochs = std::stoi(value);
            else if (key == "batch_size") opt.model.batch_size = std::stoi(value);
            else if (key == "early_stop_patience") opt.model.early_stop_patience = std::stoi(value);
            else if (key == "codebook_restarts") opt.model.codebook_restarts = value == "1" || value == "true";
            else throw ArgumentError(opt.config_path + ":" + std::to_string(line_no) +
                                     ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ArgumentError(opt.config_path + ":" + std::to_string(line_no) +
                                ": bad value for '" + key + "'");
        }
    }
}

nlohmann::json config_json(const ModelConfig& m) {
    return {{"channels", m.channels},
            {"codebook_size", m.codebook_size},
            {"beta", m.beta},
            {"lr", m.lr},
            {"epochs", m.epochs},
            {"batch_size", m.batch_size},
            {"seed", m.seed},
            {"leaky_slope", m.leaky_slope},
            {"early_stop_patience", m.early_stop_patience},
            {"min_repr_length", m.min_repr_length},
            {"codebook_solver", m.codebook_solver == CodebookSolver::adam ? "adam" : "sgd"},
            {"codebook_lr", m.codebook_lr},
            {"codebook_restarts", m.codebook_restarts}};
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
}

std::vector<TrainedModel> load_models(const std::string& dir) {
    std::vector<TrainedModel> models;
    for (int B = 1; B <= 8; ++B) {
        const fs::path p = fs::path(dir) / ("model_depth" + std::to_string(B) + ".json");
        if (fs::exists(p)) models.push_back(load_model(p.string()));
    }
    if (models.empty()) throw ArgumentError("no model_depth*.json files in " + dir);
    return models;
}

PipelineConfig pipeline_config(const Options& opt) {
    PipelineConfig cfg;
    cfg.model = opt.model;
    cfg.depths = opt.depths;
    cfg.fit.seed = opt.model.seed;
    return cfg;
}

// ---------------------------------------------------------------- train ----
int cmd_train(const Options& opt) {
    auto ds = load_input(opt);
    znormalize(ds);
    fs::create_directories(opt.out_dir);
    const auto cfg = pipeline_config(opt);
    const auto models = train_depths(ds, cfg);
    for (const auto& model : models)
        save_model(model, (fs::path(opt.out_dir) /
                           ("model_depth" + std::to_string(model.config.depth) + ".json"))
                              .string());
    nlohmann::json manifest;
    manifest["command"] = "train";
    manifest["dataset"] = ds.name;
    manifest["series_length"] = ds.train.front().values.size();
    manifest["depths_requested"] = opt.depths;
    manifest["depths_trained"] = models.size();
    manifest["znormalize"] = true;
    manifest["config"] = config_json(opt.model);
    write_text(fs::path(opt.out_dir) / "manifest.json", manifest.dump(2) + "\n");
    std::cout << "trained " << models.size() << " models in " << opt.out_dir << '\n';
    return 0;
}

// --------------------------------------------------------------- encode ----
void write_representations(const TrainedModel& model, const std::vector<TimeSeries>& split,
                           const fs::path& path) {
    std::ostringstream out;
    out << "instance_id,label,symbols\n";
    int id = 0;
    for (const auto& ts : split) {
        const auto rep = represent(model, ts.values);
        out << id++ << ',' << ts.label << ',' << rep.to_string() << '\n';
    }
    write_text(path, out.str());
}

int cmd_encode(const Options& opt) {
    auto ds = load_input(opt);
    znormalize(ds);
    const auto models = load_models(opt.models_dir);
    fs::create_directories(opt.out_dir);
    for (const auto& model : models) {
        if (model.trained_length != static_cast<int>(ds.train.front().values.size()))
            throw ArgumentError("model depth " + std::to_string(model.config.depth) +
                                " was trained on length " + std::to_string(model.trained_length) +
                                ", dataset has length " +
                                std::to_string(ds.train.front().values.size()));
        const std::string d = std::to_string(model.config.depth);
        write_representations(model, ds.train,
                              fs::path(opt.out_dir) / ("representations_depth" + d + "_train.csv"));
        write_representations(model, ds.test,
                              fs::path(opt.out_dir) / ("representations_depth" + d + "_test.csv"));
    }
    std::cout << "encoded " << models.size() << " depths into " << opt.out_dir << '\n';
    return 0;
}

// ------------------------------------------------------------- classify ----
struct ClassifyArtifacts {
    MultiDepthClassifier clf;
    double train_acc = 0.0, test_acc = 0.0;
};

ClassifyArtifacts classify_with_models(const std::vector<TrainedModel>& models,
                                       const TimeSeriesDataset& ds, std::uint64_t seed) {
    if (ds.class_count < 2) throw ArgumentError("dataset has a single class");
    std::vector<int> labels;
    for (const auto& ts : ds.train) labels.push_back(ts.label);

    std::vector<DepthFeatures> depth_features;
    std::vector<std::vector<SymbolicRepresentation>> train_reps, test_reps;
    for (const auto& model : models) {
        train_reps.push_back(encode_split(model, ds.train));
        test_reps.push_back(encode_split(model, ds.test));
        DepthFeatures df;
        df.dict = build_dictionary(train_reps.back());
        const auto fvs = extract_split(train_reps.back(), df.dict);
        df.X.resize(static_cast<Eigen::Index>(fvs.size()), df.dict.size());
        for (size_t i = 0; i < fvs.size(); ++i)
            for (int j = 0; j < df.dict.size(); ++j)
                df.X(static_cast<Eigen::Index>(i), j) = fvs[i].bits[static_cast<size_t>(j)];
        depth_features.push_back(std::move(df));
    }
    FitOptions fit;
    fit.seed = seed;
    ClassifyArtifacts art;
    art.clf = fit_multidepth(depth_features, labels, ds.class_count, fit);

    auto eval = [&](const std::vector<TimeSeries>& split,
                    const std::vector<std::vector<SymbolicRepresentation>>& reps) {
        int correct = 0;
        for (size_t i = 0; i < split.size(); ++i) {
            std::vector<FeatureVector> per_depth;
            for (size_t d = 0; d < models.size(); ++d)
                per_depth.push_back(extract(reps[d][i], depth_features[d].dict));
            if (predict(art.clf, per_depth) == split[i].label) ++correct;
        }
        return split.empty() ? 0.0 : static_cast<double>(correct) / split.size();
    };
    art.train_acc = eval(ds.train, train_reps);
    art.test_acc = eval(ds.test, test_reps);
    return art;
}

int cmd_classify(const Options& opt) {
    auto ds = load_input(opt);
    znormalize(ds);
    const auto models = load_models(opt.models_dir);
    fs::create_directories(opt.out_dir);
    const auto art = classify_with_models(models, ds, opt.model.seed);
    save_classifier(art.clf, (fs::path(opt.out_dir) / "classifier.json").string());
    save_coefficient_table(art.clf, (fs::path(opt.out_dir) / "coefficients.csv").string());
    nlohmann::json metrics = {{"train_acc", art.train_acc},
                              {"test_acc", art.test_acc},
                              {"n_features_initial", art.clf.n_features_initial},
                              {"n_features_final", art.clf.n_features_final()}};
    write_text(fs::path(opt.out_dir) / "metrics.json", metrics.dump(2) + "\n");
    std::cout << metrics.dump(2) << '\n';
    return 0;
}

// -------------------------------------------------------------- explain ----
int cmd_explain(const Options& opt) {
    auto ds = load_input(opt);
    znormalize(ds);
    const auto models = load_models(opt.models_dir);
    const auto clf = load_classifier(opt.classifier_path);
    fs::create_directories(opt.out_dir);

    nlohmann::json report;
    report["global"] = nlohmann::json::array();
    for (int c = 0; c < clf.class_count; ++c) {
        const auto globals = explain_global(models, clf, c, opt.top_n);
        for (size_t i = 0; i < globals.size(); ++i) {
            report["global"].push_back(explanation_to_json(globals[i]));
            render(globals[i], (fs::path(opt.out_dir) /
                                ("global_class" + std::to_string(c) + "_f" + std::to_string(i)))
                                   .string());
        }
    }
    if (opt.instance >= 0) {
        if (opt.instance >= static_cast<int>(ds.test.size()))
            throw ArgumentError("unknown test instance id " + std::to_string(opt.instance));
        const auto local =
            explain_local(models, clf, ds.test[static_cast<size_t>(opt.instance)].values,
                          opt.instance);
        report["local"] = explanation_to_json(local);
        render(local, (fs::path(opt.out_dir) / ("local_instance" + std::to_string(opt.instance)))
                          .string());
    }
    write_text(fs::path(opt.out_dir) / "explanations.json", report.dump(2) + "\n");
    std::cout << "explanation artifacts written to " << opt.out_dir << '\n';
    return 0;
}

// ------------------------------------------------------------ benchmark ----
struct DatasetRun {
    std::string name;
    double train_acc = 0.0, test_acc = 0.0;
    int n_features_initial = 0, n_features_final = 0;
    std::vector<double> mae_train, mae_test;  // per depth
    double wall_seconds = 0.0;
    double codebook_usage_fraction = 0.0;  // mean over depths, train encoding
    std::string error;
};

// The archive benchmark list (sensor/motion/image/device datasets with >= 50
// train and test instances and <= 7 classes). Obtaining the archive files is
// the user's responsibility; `--datasets archive25 --data-root DIR` expects
// DIR/<Name>/<Name>_{TRAIN,TEST}.tsv.
const std::vector<std::string> kArchive25 = {
    "Coffee",        "Computers",         "DistalPhalanxOutlineAgeGroup",
    "DistalPhalanxOutlineCorrect",        "DistalPhalanxTW",
    "Earthquakes",   "ECG5000",           "FordA",
    "GunPoint",      "Ham",               "Herring",
    "ItalyPowerDemand",                   "LargeKitchenAppliances",
    "PhalangesOutlinesCorrect",           "ProximalPhalanxOutlineCorrect",
    "ProximalPhalanxOutlineAgeGroup",     "ProximalPhalanxTW",
    "RefrigerationDevices",               "ScreenType",
    "ShapeletSim",   "SmallKitchenAppliances",
    "Strawberry",    "Wafer",             "Wine",
    "Worms"};

std::vector<std::string> expand_dataset_items(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        if (item == "archive25")
            out.insert(out.end(), kArchive25.begin(), kArchive25.end());
        else
            out.push_back(item);
    }
    return out;
}

TimeSeriesDataset resolve_dataset(const std::string& item, const Options& opt) {
    // a synthetic family name, an archive dataset name under --data-root,
    // or explicit "name:train_path:test_path"
    const auto c1 = item.find(':');
    if (c1 == std::string::npos) {
        if (is_synth_family(item)) return make_synth(item, opt.synth_seed);
        const fs::path dir = fs::path(opt.data_root) / item;
        const fs::path train = dir / (item + "_TRAIN.tsv"), test = dir / (item + "_TEST.tsv");
        if (fs::exists(train) && fs::exists(test))
            return load_dataset(train.string(), test.string(), item);
        throw ArgumentError("dataset '" + item + "': not a synthetic family and " +
                            train.string() + " not found");
    }
    const auto c2 = item.find(':', c1 + 1);
    if (c2 == std::string::npos)
        throw ArgumentError("dataset item '" + item + "': expected FAMILY or name:train:test");
    return load_dataset(item.substr(c1 + 1, c2 - c1 - 1), item.substr(c2 + 1),
                        item.substr(0, c1));
}

DatasetRun run_one(const std::string& item, const Options& opt, std::uint64_t seed) {
    DatasetRun run;
    const auto t0 = std::chrono::steady_clock::now();
    auto ds = resolve_dataset(item, opt);
    run.name = ds.name;
    auto cfg = pipeline_config(opt);
    cfg.model.seed = seed;
    cfg.fit.seed = seed;
    auto res = run_pipeline(ds, cfg);
    run.train_acc = res.train_acc;
    run.test_acc = res.test_acc;
    run.n_features_initial = res.clf.n_features_initial;
    run.n_features_final = res.clf.n_features_final();
    znormalize(ds);
    double usage_sum = 0.0;
    for (const auto& model : res.models) {
        run.mae_train.push_back(pointwise_mae(model, ds.train));
        run.mae_test.push_back(pointwise_mae(model, ds.test));
        model.codebook.reset_usage();
        for (const auto& ts : ds.train) (void)represent(model, ts.values);
        int used = 0;
        for (long u : model.codebook.usage)
            if (u > 0) ++used;
        usage_sum += static_cast<double>(used) / model.codebook.size();
    }
    run.codebook_usage_fraction = usage_sum / static_cast<double>(res.models.size());
    run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

std::vector<DatasetRun> run_benchmark(const Options& opt) {
    const auto items = expand_dataset_items(opt.datasets);
    if (items.empty()) throw ArgumentError("benchmark: empty dataset list");
    std::vector<DatasetRun> runs(items.size());
    std::atomic<int> failures{0};
    // datasets are independent and individually seeded; fan out on workers
    parallel_for(static_cast<int>(items.size()), [&](int idx) {
        const auto& item = items[static_cast<size_t>(idx)];
        DatasetRun agg;
        try {
            for (int s = 0; s < opt.seeds; ++s) {
                const auto run = run_one(item, opt, opt.model.seed + static_cast<std::uint64_t>(s));
                if (s == 0) {
                    agg = run;
                } else {
                    agg.train_acc += run.train_acc;
                    agg.test_acc += run.test_acc;
                    agg.n_features_initial += run.n_features_initial;
                    agg.n_features_final += run.n_features_final;
                    agg.wall_seconds += run.wall_seconds;
                    agg.codebook_usage_fraction += run.codebook_usage_fraction;
                    for (size_t d = 0; d < agg.mae_train.size() && d < run.mae_train.size(); ++d) {
                        agg.mae_train[d] += run.mae_train[d];
                        agg.mae_test[d] += run.mae_test[d];
                    }
                }
            }
            const double n = opt.seeds;
            agg.train_acc /= n;
            agg.test_acc /= n;
            agg.n_features_initial = static_cast<int>(agg.n_features_initial / n);
            agg.n_features_final = static_cast<int>(agg.n_features_final / n);
            agg.codebook_usage_fraction /= n;
            for (auto& v : agg.mae_train) v /= n;
            for (auto& v : agg.mae_test) v /= n;
        } catch (const std::exception& e) {
            agg.name = item;
            agg.error = e.what();
            std::cerr << "dataset " << item << " failed: " << e.what() << '\n';
            ++failures;
        }
        runs[static_cast<size_t>(idx)] = std::move(agg);
    });
    if (failures == static_cast<int>(items.size()))
        throw TrainingError("all benchmark datasets failed", 0);
    return runs;
}

std::string fmt(double v, int prec = 3) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

void write_benchmark_reports(const std::vector<DatasetRun>& runs, const Options& opt,
                             const std::string& stem) {
    std::ostringstream md, csv, times;
    md << "# Benchmark report\n\n"
       << "Seeds per dataset: " << opt.seeds << "\n\n"
       << "| dataset | train acc | test acc | features initial | features final | depth-1 MAE "
          "(train/test) | codebook usage |\n"
       << "|---|---|---|---|---|---|---|\n";
    csv << "dataset,train_acc,test_acc,n_features_initial,n_features_final,"
           "mae_train_depth1,mae_test_depth1,codebook_usage_fraction,error\n";
    times << "dataset,wall_seconds\n";
    double acc_sum = 0.0;
    int ok = 0;
    for (const auto& run : runs) {
        if (!run.error.empty()) {
            md << "| " << run.name << " | failed | | | | | |\n";
            csv << run.name << ",,,,,,,," << '"' << run.error << '"' << '\n';
            continue;
        }
        acc_sum += run.test_acc;
        ++ok;
        const double m1tr = run.mae_train.empty() ? 0.0 : run.mae_train[0];
        const double m1te = run.mae_test.empty() ? 0.0 : run.mae_test[0];
        md << "| " << run.name << " | " << fmt(run.train_acc) << " | " << fmt(run.test_acc)
           << " | " << run.n_features_initial << " | " << run.n_features_final << " | "
           << fmt(m1tr) << " / " << fmt(m1te) << " | " << fmt(run.codebook_usage_fraction, 2)
           << " |\n";
        csv << run.name << ',' << fmt(run.train_acc, 6) << ',' << fmt(run.test_acc, 6) << ','
            << run.n_features_initial << ',' << run.n_features_final << ',' << fmt(m1tr, 6) << ','
            << fmt(m1te, 6) << ',' << fmt(run.codebook_usage_fraction, 6) << ",\n";
        times << run.name << ',' << fmt(run.wall_seconds, 1) << '\n';
    }
    if (ok > 0) md << "\nMean test accuracy: " << fmt(acc_sum / ok) << "\n";
    fs::create_directories(opt.out_dir);
    write_text(fs::path(opt.out_dir) / (stem + ".md"), md.str());
    write_text(fs::path(opt.out_dir) / (stem + ".csv"), csv.str());
    write_text(fs::path(opt.out_dir) / (stem + "_timings.csv"), times.str());
}

int cmd_benchmark(const Options& opt) {
    const auto runs = run_benchmark(opt);
    write_benchmark_reports(runs, opt, "benchmark");
    double acc = 0.0;
    int ok = 0;
    for (const auto& r : runs)
        if (r.error.empty()) {
            acc += r.test_acc;
            ++ok;
        }
    std::cout << "benchmark mean test accuracy " << fmt(ok ? acc / ok : 0.0) << " over " << ok
              << " datasets; reports in " << opt.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------- sweep ----
int cmd_sweep(const Options& opt) {
    if (opt.datasets.empty()) throw ArgumentError("sweep: empty dataset list");
    std::vector<int> sizes = opt.codebook_sizes;
    std::sort(sizes.begin(), sizes.end());
    std::ostringstream md, csv;
    md << "# Codebook size sweep\n\n"
       << "| K | mean test acc | mean codebook usage |\n|---|---|---|\n";
    csv << "codebook_size,dataset,test_acc,codebook_usage_fraction\n";
    fs::create_directories(opt.out_dir);
    for (int K : sizes) {
        Options o = opt;
        o.model.codebook_size = K;
        const auto runs = run_benchmark(o);
        write_benchmark_reports(runs, opt, "sweep_k" + std::to_string(K));
        double acc = 0.0, usage = 0.0;
        int ok = 0;
        for (const auto& r : runs) {
            if (!r.error.empty()) continue;
            acc += r.test_acc;
            usage += r.codebook_usage_fraction;
            ++ok;
            csv << K << ',' << r.name << ',' << fmt(r.test_acc, 6) << ','
                << fmt(r.codebook_usage_fraction, 6) << '\n';
        }
        md << "| " << K << " | " << fmt(ok ? acc / ok : 0.0) << " | "
           << fmt(ok ? usage / ok : 0.0, 2) << " |\n";
    }
    write_text(fs::path(opt.out_dir) / "sweep.md", md.str());
    write_text(fs::path(opt.out_dir) / "sweep.csv", csv.str());
    std::cout << "sweep reports in " << opt.out_dir << '\n';
    return 0;
}

// ---------------------------------------------------------------- synth ----
int cmd_synth(const Options& opt) {
    const auto ds = make_synth(opt.synth_family, opt.synth_seed);
    fs::create_directories(opt.out_dir);
    save_dataset(ds, (fs::path(opt.out_dir) / (ds.name + "_TRAIN.tsv")).string(),
                 (fs::path(opt.out_dir) / (ds.name + "_TEST.tsv")).string());
    std::cout << "wrote " << ds.name << " to " << opt.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic time-series representation toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* cmd, bool needs_data) {
        cmd->add_option("--config", opt.config_path, "flat key=value config file");
        cmd->add_option("--seed", opt.model.seed, "base random seed");
        cmd->add_option("--out", opt.out_dir, "output directory");
        if (needs_data) {
            cmd->add_option("--train", opt.train_path, "train split file (UCR layout)");
            cmd->add_option("--test", opt.test_path, "test split file (UCR layout)");
            cmd->add_option("--name", opt.dataset_name, "dataset name");
            cmd->add_option("--synth", opt.synth_family, "generate a synthetic dataset instead");
            cmd->add_option("--synth-seed", opt.synth_seed, "seed for --synth");
        }
    };
    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("--depths", opt.depths, "number of depths D (capped by length)");
        cmd->add_option("--codebook-size", opt.model.codebook_size, "codebook size K");
        cmd->add_option("--latent-dim", opt.model.channels, "latent dimension Z");
        cmd->add_option("--beta", opt.model.beta, "commitment weight");
        cmd->add_option("--epochs", opt.model.epochs, "training epochs");
        cmd->add_option("--lr", opt.model.lr, "learning rate");
        cmd->add_option("--batch-size", opt.model.batch_size, "batch size (0 = auto)");
    };

    auto* train_cmd = app.add_subcommand("train", "train one model per depth");
    add_common(train_cmd, true);
    add_model(train_cmd);

    auto* encode_cmd = app.add_subcommand("encode", "emit symbolic representations");
    add_common(encode_cmd, true);
    encode_cmd->add_option("--models", opt.models_dir, "directory with model_depth*.json")
        ->required();

    auto* classify_cmd = app.add_subcommand("classify", "fit the multi-depth classifier");
    add_common(classify_cmd, true);
    classify_cmd->add_option("--models", opt.models_dir, "directory with model_depth*.json")
        ->required();

    auto* explain_cmd = app.add_subcommand("explain", "interpretability reports");
    add_common(explain_cmd, true);
    explain_cmd->add_option("--models", opt.models_dir, "directory with model_depth*.json")
        ->required();
    explain_cmd->add_option("--classifier", opt.classifier_path, "classifier.json path")
        ->required();
    explain_cmd->add_option("--instance", opt.instance, "test instance id for a local report");
    explain_cmd->add_option("--top", opt.top_n, "top features per class");

    auto* bench_cmd = app.add_subcommand("benchmark", "full pipeline over datasets");
    add_common(bench_cmd, false);
    add_model(bench_cmd);
    bench_cmd
        ->add_option("--datasets", opt.datasets,
                     "synthetic families, archive names under --data-root, 'archive25', or name:train:test")
        ->required();
    bench_cmd->add_option("--seeds", opt.seeds, "number of seeds to average");
    bench_cmd->add_option("--synth-seed", opt.synth_seed, "seed for synthetic families");
    bench_cmd->add_option("--data-root", opt.data_root,
                          "directory holding <Name>/<Name>_{TRAIN,TEST}.tsv archive files");

    auto* sweep_cmd = app.add_subcommand("sweep", "benchmark across codebook sizes");
    add_common(sweep_cmd, false);
    add_model(sweep_cmd);
    sweep_cmd
        ->add_option("--datasets", opt.datasets,
                     "synthetic families, archive names under --data-root, 'archive25', or name:train:test")
        ->required();
    sweep_cmd->add_option("--codebook-sizes", opt.codebook_sizes, "K values to sweep");
    sweep_cmd->add_option("--seeds", opt.seeds, "number of seeds to average");
    sweep_cmd->add_option("--synth-seed", opt.synth_seed, "seed for synthetic families");
    sweep_cmd->add_option("--data-root", opt.data_root,
                          "directory holding <Name>/<Name>_{TRAIN,TEST}.tsv archive files");

    auto* synth_cmd = app.add_subcommand("synth", "materialize a synthetic dataset");
    add_common(synth_cmd, false);
    synth_cmd->add_option("--family", opt.synth_family, "synthetic family name")->required();
    synth_cmd->add_option("--synth-seed", opt.synth_seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        apply_config_file(opt);
        // re-apply CLI flags on top of the config file: flags win
        app.clear();
        app.parse(argc, argv);

        if (train_cmd->parsed()) return cmd_train(opt);
        if (encode_cmd->parsed()) return cmd_encode(opt);
        if (classify_cmd->parsed()) return cmd_classify(opt);
        if (explain_cmd->parsed()) return cmd_explain(opt);
        if (bench_cmd->parsed()) return cmd_benchmark(opt);
        if (sweep_cmd->parsed()) return cmd_sweep(opt);
        if (synth_cmd->parsed()) return cmd_synth(opt);
        return 2;
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TrainingError& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}
