#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tsglyph/tensor.hpp"

using namespace tsglyph;

namespace {

ConvLayer single_channel_kernel(double w0, double w1, double w2, double bias = 0.0) {
    ConvLayer layer = ConvLayer::zeros(1, 1);
    layer.taps[0](0, 0) = w0;
    layer.taps[1](0, 0) = w1;
    layer.taps[2](0, 0) = w2;
    layer.bias(0) = bias;
    return layer;
}

Tensor1D row(std::initializer_list<double> values) {
    Tensor1D x(1, static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x(0, i++) = v;
    return x;
}

Tensor1D random_tensor(int channels, int length, Rng& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Tensor1D x(channels, length);
    for (int c = 0; c < channels; ++c)
        for (int t = 0; t < length; ++t) x(c, t) = dist(rng);
    return x;
}

}  // namespace

TEST_CASE("conv1d identity kernel passes input through") {
    const auto layer = single_channel_kernel(0.0, 1.0, 0.0);
    const Tensor1D out = conv1d_forward(layer, row({1, 2, 3}));
    CHECK(out(0, 0) == Catch::Approx(1.0));
    CHECK(out(0, 1) == Catch::Approx(2.0));
    CHECK(out(0, 2) == Catch::Approx(3.0));
}

TEST_CASE("conv1d box kernel with zero padding") {
    const auto layer = single_channel_kernel(1.0, 1.0, 1.0);
    const Tensor1D out = conv1d_forward(layer, row({1, 2, 3}));
    CHECK(out(0, 0) == Catch::Approx(3.0));
    CHECK(out(0, 1) == Catch::Approx(6.0));
    CHECK(out(0, 2) == Catch::Approx(5.0));
}

TEST_CASE("conv1d preserves sequence length") {
    Rng rng(7);
    for (int len : {1, 2, 5, 31}) {
        const auto layer = ConvLayer::randn(3, 2, rng);
        const Tensor1D x = random_tensor(2, len, rng);
        CHECK(conv1d_forward(layer, x).cols() == len);
    }
}

TEST_CASE("conv1d rejects channel mismatch") {
    Rng rng(1);
    const auto layer = ConvLayer::randn(4, 2, rng);
    CHECK_THROWS_AS(conv1d_forward(layer, random_tensor(3, 10, rng)), ShapeError);
}

TEST_CASE("conv1d is linear in its input for zero bias") {
    Rng rng(11);
    auto layer = ConvLayer::randn(3, 3, rng);
    layer.bias.setZero();
    const Tensor1D x = random_tensor(3, 17, rng);
    const Tensor1D y = random_tensor(3, 17, rng);
    const double a = 0.7, b = -1.3;
    const Tensor1D lhs = conv1d_forward(layer, a * x + b * y);
    const Tensor1D rhs = a * conv1d_forward(layer, x) + b * conv1d_forward(layer, y);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("conv1d is shift equivariant away from boundaries") {
    Rng rng(13);
    const auto layer = ConvLayer::randn(2, 2, rng);
    const int len = 24, k = 3;
    const Tensor1D x = random_tensor(2, len, rng);
    Tensor1D shifted = Tensor1D::Zero(2, len);
    shifted.rightCols(len - k) = x.leftCols(len - k);
    const Tensor1D out = conv1d_forward(layer, x);
    const Tensor1D out_shifted = conv1d_forward(layer, shifted);
    // interior indices at distance >= 1 + k from the ends
    for (int t = 1 + k; t < len - 1; ++t)
        for (int c = 0; c < 2; ++c)
            CHECK(out_shifted(c, t) == Catch::Approx(out(c, t - k)).margin(1e-12));
}

TEST_CASE("conv1d backward: zero upstream gradient gives zero gradients") {
    Rng rng(3);
    const auto layer = ConvLayer::randn(2, 2, rng);
    const Tensor1D x = random_tensor(2, 9, rng);
    ConvGrads grads = ConvGrads::zeros_like(layer);
    Tensor1D grad_x;
    conv1d_backward(layer, x, Tensor1D::Zero(2, 9), grads, grad_x);
    CHECK(grad_x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(grads.bias.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& t : grads.taps) CHECK(t.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("conv1d backward matches central finite differences") {
    Rng rng(17);
    auto layer = ConvLayer::randn(2, 3, rng);
    Tensor1D x = random_tensor(3, 7, rng);
    const Tensor1D grad_out = random_tensor(2, 7, rng);

    // Scalar loss sum(grad_out .* conv(x)) so d loss / d grad matches backward.
    auto loss = [&]() { return (grad_out.array() * conv1d_forward(layer, x).array()).sum(); };

    ConvGrads grads = ConvGrads::zeros_like(layer);
    Tensor1D grad_x;
    conv1d_backward(layer, x, grad_out, grads, grad_x);

    std::vector<ParamRef> params;
    std::vector<std::vector<double>> analytic;
    for (int k = 0; k < 3; ++k) {
        params.push_back({"tap" + std::to_string(k), layer.taps[k].data(), layer.taps[k].size()});
        analytic.emplace_back(grads.taps[k].data(), grads.taps[k].data() + grads.taps[k].size());
    }
    params.push_back({"bias", layer.bias.data(), layer.bias.size()});
    analytic.emplace_back(grads.bias.data(), grads.bias.data() + grads.bias.size());
    params.push_back({"x", x.data(), x.size()});
    analytic.emplace_back(grad_x.data(), grad_x.data() + grad_x.size());

    const auto report = grad_check(loss, params, analytic);
    CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("conv1d grad_x is correlation with the flipped kernel") {
    // 1-channel linear layer: grad_x[u] = sum_k w[k] * g[u - k + 1].
    const auto layer = single_channel_kernel(0.5, -1.0, 2.0);
    const Tensor1D x = row({1, 2, 3, 4, 5});
    const Tensor1D g = row({1, 0, -1, 2, 1});
    ConvGrads grads = ConvGrads::zeros_like(layer);
    Tensor1D grad_x;
    conv1d_backward(layer, x, g, grads, grad_x);
    for (int u = 0; u < 5; ++u) {
        double expect = 0.0;
        for (int k = 0; k < 3; ++k) {
            const int t = u - k + 1;
            if (t >= 0 && t < 5) expect += layer.taps[static_cast<size_t>(k)](0, 0) * g(0, t);
        }
        CHECK(grad_x(0, u) == Catch::Approx(expect));
    }
}

TEST_CASE("leaky_relu definition and identity region") {
    const Tensor1D out = leaky_relu(row({-1, 0, 2}), 0.01);
    CHECK(out(0, 0) == Catch::Approx(-0.01));
    CHECK(out(0, 1) == Catch::Approx(0.0));
    CHECK(out(0, 2) == Catch::Approx(2.0));

    Rng rng(5);
    const Tensor1D pos = random_tensor(2, 10, rng).cwiseAbs();
    CHECK((leaky_relu(pos, 0.01) - pos).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(leaky_relu(pos, 1.5), ArgumentError);
}

TEST_CASE("leaky_relu backward matches finite differences away from zero") {
    Rng rng(23);
    Tensor1D x = random_tensor(2, 11, rng);
    // keep samples away from the kink
    x = (x.array().abs() < 0.1).select(x.array() + 0.5, x.array());
    const Tensor1D g = random_tensor(2, 11, rng);
    const double slope = 0.01;

    auto loss = [&]() { return (g.array() * leaky_relu(x, slope).array()).sum(); };
    const Tensor1D grad_x = leaky_relu_backward(x, g, slope);

    const auto report = grad_check(
        loss, {{"x", x.data(), x.size()}},
        {std::vector<double>(grad_x.data(), grad_x.data() + grad_x.size())});
    CHECK(report.max_rel_error < 1e-6);
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
    Vector p(3);
    p << 1.0, -2.0, 3.0;
    const Vector before = p;
    AdamState state(3);
    adam_step(state, p, Vector::Zero(3));
    CHECK((p - before).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("adam: first step with unit gradient moves by about -lr") {
    Vector p(1);
    p << 0.0;
    AdamConfig cfg;
    cfg.lr = 0.1;
    AdamState state(1, cfg);
    Vector g(1);
    g << 1.0;
    adam_step(state, p, g);
    CHECK(p(0) == Catch::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("adam converges on a 1-D convex quadratic") {
    // f(p) = (p - 3)^2, minimum at 3
    Vector p(1);
    p << -5.0;
    AdamConfig cfg;
    cfg.lr = 0.05;
    AdamState state(1, cfg);
    for (int i = 0; i < 2000; ++i) {
        Vector g(1);
        g << 2.0 * (p(0) - 3.0);
        adam_step(state, p, g);
    }
    CHECK(std::abs(p(0) - 3.0) < 1e-4);
}

TEST_CASE("grad_check on a conv + LeakyReLU + MSE toy net") {
    Rng rng(29);
    auto layer = ConvLayer::randn(2, 1, rng);
    const Tensor1D x = random_tensor(1, 9, rng);
    const Tensor1D target = random_tensor(2, 9, rng);
    const double slope = 0.01;

    auto loss = [&]() {
        const Tensor1D out = leaky_relu(conv1d_forward(layer, x), slope);
        return (out - target).array().square().mean();
    };

    const Tensor1D pre = conv1d_forward(layer, x);
    const Tensor1D out = leaky_relu(pre, slope);
    Tensor1D g = (2.0 / out.size()) * (out - target);
    g = leaky_relu_backward(pre, g, slope);
    ConvGrads grads = ConvGrads::zeros_like(layer);
    Tensor1D grad_x;
    conv1d_backward(layer, x, g, grads, grad_x);

    std::vector<ParamRef> params;
    std::vector<std::vector<double>> analytic;
    for (int k = 0; k < 3; ++k) {
        params.push_back({"tap" + std::to_string(k), layer.taps[k].data(), layer.taps[k].size()});
        analytic.emplace_back(grads.taps[k].data(), grads.taps[k].data() + grads.taps[k].size());
    }
    params.push_back({"bias", layer.bias.data(), layer.bias.size()});
    analytic.emplace_back(grads.bias.data(), grads.bias.data() + grads.bias.size());

    const auto report = grad_check(loss, params, analytic);
    CHECK(report.max_rel_error < 1e-5);
}

TEST_CASE("grad_check rejects non-deterministic closures") {
    double p = 1.0;
    std::mt19937 noisy(0);
    auto loss = [&]() {
        return p * p + std::uniform_real_distribution<double>(0.0, 1.0)(noisy);
    };
    CHECK_THROWS_AS(grad_check(loss, {{"p", &p, 1}}, {{2.0}}), DeterminismError);
}
