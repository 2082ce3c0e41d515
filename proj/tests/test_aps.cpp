#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tsglyph/aps.hpp"

using namespace tsglyph;

namespace {

Tensor1D row(std::initializer_list<double> values) {
    Tensor1D x(1, static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x(0, i++) = v;
    return x;
}

// Zero context of length `total` with `content` inserted at `offset`.
Tensor1D embed(const Tensor1D& content, int total, int offset) {
    Tensor1D x = Tensor1D::Zero(content.rows(), total);
    x.middleCols(offset, content.cols()) = content;
    return x;
}

Tensor1D random_content(int channels, int length, unsigned seed) {
    Rng rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Tensor1D x(channels, length);
    for (int c = 0; c < channels; ++c)
        for (int t = 0; t < length; ++t) x(c, t) = dist(rng) + 0.1;
    return x;
}

}  // namespace

TEST_CASE("aps_down keeps the polyphase component with the larger L1 norm") {
    const auto r1 = aps_down(row({1, 5, 2, 7}));
    CHECK(r1.entry.phase == 1);
    CHECK(r1.out(0, 0) == Catch::Approx(5));
    CHECK(r1.out(0, 1) == Catch::Approx(7));

    const auto r2 = aps_down(row({9, 0, 9, 0}));
    CHECK(r2.entry.phase == 0);
    CHECK(r2.out(0, 0) == Catch::Approx(9));
    CHECK(r2.out(0, 1) == Catch::Approx(9));
}

TEST_CASE("aps_down ties break to phase 0") {
    const auto r = aps_down(row({1, 1, 1, 1}));
    CHECK(r.entry.phase == 0);
}

TEST_CASE("aps_down rejects sequences shorter than 2") {
    CHECK_THROWS_AS(aps_down(row({1})), ShapeError);
}

TEST_CASE("aps_down pads odd lengths and yields ceil(L/2)") {
    const auto r = aps_down(row({1, 2, 3, 4, 5}));
    CHECK(r.entry.prepadded);
    CHECK(r.out.cols() == 3);
    // even phase of [1,2,3,4,5,5]
    CHECK(r.out(0, 2) == Catch::Approx(5));
}

TEST_CASE("aps_down_pinned forces the phase") {
    const Tensor1D out = aps_down_pinned(row({1, 5, 2, 7}), 0);
    CHECK(out(0, 0) == Catch::Approx(1));
    CHECK(out(0, 1) == Catch::Approx(2));

    const auto free = aps_down(row({1, 5, 2, 7}));
    const Tensor1D pinned = aps_down_pinned(row({1, 5, 2, 7}), free.entry.phase);
    CHECK((pinned - free.out).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("aps_up places values at phase positions") {
    const Tensor1D a = aps_up(row({5, 7}), 1, 4);
    CHECK(a(0, 0) == 0.0);
    CHECK(a(0, 1) == 5.0);
    CHECK(a(0, 2) == 0.0);
    CHECK(a(0, 3) == 7.0);

    const Tensor1D b = aps_up(row({9, 9}), 0, 4);
    CHECK(b(0, 0) == 9.0);
    CHECK(b(0, 1) == 0.0);
    CHECK(b(0, 2) == 9.0);
    CHECK(b(0, 3) == 0.0);

    CHECK_THROWS_AS(aps_up(row({1, 2}), 0, 7), ShapeError);
}

TEST_CASE("aps_up after aps_down restores retained indices") {
    const Tensor1D s = row({3, -1, 4, -5, 9, 2});
    const auto down = aps_down(s);
    const Tensor1D up = aps_up(down.out, down.entry.phase, static_cast<int>(s.cols()));
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
        if (t % 2 == down.entry.phase)
            CHECK(up(0, t) == s(0, t));
        else
            CHECK(up(0, t) == 0.0);
    }
}

TEST_CASE("even-shift law: shifting by even k shifts the output by k/2") {
    const Tensor1D content = random_content(2, 16, 99);
    const int total = 64;
    for (int k : {2, 4, 6}) {
        const Tensor1D x = embed(content, total, 10);
        const Tensor1D xs = embed(content, total, 10 + k);
        const auto base = aps_down(x);
        const auto shifted = aps_down(xs);
        CHECK(base.entry.phase == shifted.entry.phase);
        const int half_shift = k / 2;
        const auto cols = base.out.cols() - half_shift;
        CHECK((shifted.out.rightCols(cols) - base.out.leftCols(cols)).cwiseAbs().maxCoeff() == 0.0);
        CHECK(shifted.out.leftCols(half_shift).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("odd-shift law: output equals one of the two admissible shifts") {
    const Tensor1D content = random_content(1, 15, 7);
    const int total = 64;
    for (int k : {1, 3, 5}) {
        const Tensor1D x = embed(content, total, 12);
        const Tensor1D xs = embed(content, total, 12 + k);
        const Tensor1D base = aps_down(x).out;
        const Tensor1D shifted = aps_down(xs).out;
        bool matched = false;
        for (int d : {(k - 1) / 2, (k + 1) / 2}) {
            const auto cols = base.cols() - d;
            if ((shifted.rightCols(cols) - base.leftCols(cols)).cwiseAbs().maxCoeff() == 0.0)
                matched = true;
        }
        CHECK(matched);
    }
}

TEST_CASE("aps_up is exactly shift equivariant: input shift k gives output shift 2k") {
    const Tensor1D content = random_content(1, 8, 3);
    const int total = 32;
    for (int k : {1, 2, 5}) {
        const Tensor1D x = embed(content, total, 4);
        const Tensor1D xs = embed(content, total, 4 + k);
        const Tensor1D up = aps_up(x, 0, 2 * total);
        const Tensor1D up_shifted = aps_up(xs, 0, 2 * total);
        const auto cols = up.cols() - 2 * k;
        CHECK((up_shifted.rightCols(cols) - up.leftCols(cols)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("aps_down preserves at least half the L1 norm") {
    for (unsigned seed : {1u, 2u, 3u, 4u}) {
        const Tensor1D s = random_content(3, 21, seed);
        const auto down = aps_down(s);
        CHECK(down.out.cwiseAbs().sum() >= 0.5 * s.cwiseAbs().sum() - 1e-12);
    }
}

TEST_CASE("aps backward ops route gradients to retained indices only") {
    const Tensor1D s = row({1, 5, 2, 7, 3, 8});
    const auto down = aps_down(s);
    Tensor1D g(1, 3);
    g << 10, 20, 30;
    const Tensor1D grad_in = aps_down_backward(g, down.entry);
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
        if (t % 2 == down.entry.phase)
            CHECK(grad_in(0, t) == g(0, t / 2));
        else
            CHECK(grad_in(0, t) == 0.0);
    }

    const Tensor1D gu = row({1, 2, 3, 4, 5, 6});
    const Tensor1D back = aps_up_backward(gu, 1, 3);
    CHECK(back(0, 0) == 2.0);
    CHECK(back(0, 1) == 4.0);
    CHECK(back(0, 2) == 6.0);
}
