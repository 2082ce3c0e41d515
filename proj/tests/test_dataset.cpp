#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "tsglyph/dataset.hpp"

using namespace tsglyph;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        static int counter = 0;
        path = "tsglyph_test_" + std::to_string(counter++) + ".txt";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

const char* kTinyTrain = "1\t0.0\t1.0\t2.0\t3.0\t4.0\t5.0\t6.0\t7.0\n"
                         "2\t7.0\t6.0\t5.0\t4.0\t3.0\t2.0\t1.0\t0.0\n";
const char* kTinyTest = "2\t1.0\t1.0\t2.0\t3.0\t4.0\t5.0\t6.0\t7.0\n"
                        "1\t0.0\t0.5\t1.0\t1.5\t2.0\t2.5\t3.0\t3.5\n";

}  // namespace

TEST_CASE("load_dataset parses rows and remaps labels to 0-based ids") {
    TempFile train(kTinyTrain);
    TempFile test(kTinyTest);
    const auto ds = load_dataset(train.path, test.path, "tiny");
    CHECK(ds.class_count == 2);
    CHECK(ds.train.size() == 2);
    CHECK(ds.test.size() == 2);
    CHECK(ds.train[0].label == 0);  // original label 1
    CHECK(ds.train[1].label == 1);  // original label 2
    CHECK(ds.train[0].values == std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7});
    CHECK(ds.original_labels.at(0) == 1.0);
    CHECK(ds.original_labels.at(1) == 2.0);
}

TEST_CASE("load_dataset auto-detects comma delimiter") {
    TempFile train("0,1,2,3,4,5,6,7,8\n1,8,7,6,5,4,3,2,1\n");
    TempFile test("0,0,0,0,0,1,1,1,1\n1,2,2,2,2,3,3,3,3\n");
    const auto ds = load_dataset(train.path, test.path);
    CHECK(ds.length() == 8);
    CHECK(ds.train[1].values.front() == 8.0);
}

TEST_CASE("load_dataset reports ragged rows with their location") {
    TempFile train("1\t0\t1\t2\t3\t4\t5\t6\t7\n1\t0\t1\t2\t3\t4\t5\t6\n");
    TempFile test(kTinyTest);
    CHECK_THROWS_MATCHES(load_dataset(train.path, test.path), FormatError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring(":2")));
}

TEST_CASE("load_dataset reports non-numeric fields with their position") {
    TempFile train("1\t0\t1\tbad\t3\t4\t5\t6\t7\n");
    TempFile test(kTinyTest);
    CHECK_THROWS_MATCHES(
        load_dataset(train.path, test.path), FormatError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("field 4")));
}

TEST_CASE("load_dataset rejects empty files") {
    TempFile train("");
    TempFile test(kTinyTest);
    CHECK_THROWS_AS(load_dataset(train.path, test.path), FormatError);
}

TEST_CASE("znormalize standardizes each instance with population sigma") {
    TempFile train("1\t2\t4\t6\t2\t4\t6\t2\t4\n");
    TempFile test("1\t2\t4\t6\t2\t4\t6\t2\t4\n");
    auto ds = load_dataset(train.path, test.path);
    ds.train[0].values = {2, 4, 6};  // shrink for the hand-computed case
    ds.test.clear();
    const auto norm = znormalize(ds);
    CHECK(norm.train[0].values[0] == Catch::Approx(-1.2247448).epsilon(1e-6));
    CHECK(norm.train[0].values[1] == Catch::Approx(0.0).margin(1e-12));
    CHECK(norm.train[0].values[2] == Catch::Approx(1.2247448).epsilon(1e-6));
}

TEST_CASE("znormalize maps constant instances to zeros") {
    TimeSeriesDataset ds;
    ds.train.push_back({{5, 5, 5, 5, 5, 5, 5, 5}, 0});
    const auto norm = znormalize(ds);
    for (double v : norm.train[0].values) CHECK(v == 0.0);
}

TEST_CASE("znormalize is idempotent") {
    TimeSeriesDataset ds;
    ds.train.push_back({{0.3, -1.2, 2.5, 0.0, 1.1, -0.7, 0.9, -2.0}, 0});
    const auto once = znormalize(ds);
    const auto twice = znormalize(once);
    for (size_t t = 0; t < once.train[0].values.size(); ++t)
        CHECK(std::abs(once.train[0].values[t] - twice.train[0].values[t]) < 1e-9);

    // mean within 1e-6 of 0, sd within 1e-6 of 1
    double mean = 0, ss = 0;
    for (double v : once.train[0].values) mean += v;
    mean /= 8.0;
    for (double v : once.train[0].values) ss += (v - mean) * (v - mean);
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(std::sqrt(ss / 8.0) - 1.0) < 1e-6);
}

TEST_CASE("save then load round-trips label and value content") {
    TempFile train(kTinyTrain);
    TempFile test(kTinyTest);
    const auto ds = load_dataset(train.path, test.path, "tiny");

    TempFile train2("");
    TempFile test2("");
    save_dataset(ds, train2.path, test2.path);
    const auto ds2 = load_dataset(train2.path, test2.path, "tiny");

    REQUIRE(ds2.train.size() == ds.train.size());
    REQUIRE(ds2.test.size() == ds.test.size());
    for (size_t i = 0; i < ds.train.size(); ++i) {
        CHECK(ds2.train[i].label == ds.train[i].label);
        CHECK(ds2.train[i].values == ds.train[i].values);
    }
    CHECK(ds2.original_labels == ds.original_labels);
}

TEST_CASE("train and test label alphabets are identical after remap") {
    TempFile train(kTinyTrain);
    TempFile test(kTinyTest);
    const auto ds = load_dataset(train.path, test.path);
    std::set<int> train_labels, test_labels;
    for (const auto& ts : ds.train) train_labels.insert(ts.label);
    for (const auto& ts : ds.test) test_labels.insert(ts.label);
    CHECK(train_labels == test_labels);
}
