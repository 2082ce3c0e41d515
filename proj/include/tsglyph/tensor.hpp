// ============================================================================
// tensor.hpp - minimal deterministic neural substrate
//
// 1D same-length convolution (kernel 3, stride 1, zero padding 1) with exact
// analytic gradients, LeakyReLU, Adam, and a finite-difference gradient
// checker. Everything is double precision and seeded.
// ============================================================================

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "tsglyph/common.hpp"

namespace tsglyph {

// ----------------------------------------------------------------------------
// Convolution layer, kernel size fixed at 3, stride 1, zero padding 1.
// taps[k] is the [out_channels x in_channels] weight matrix applied to the
// input column at offset k-1, so out[:,t] = bias + sum_k taps[k] * x[:,t+k-1].
// ----------------------------------------------------------------------------
struct ConvLayer {
    std::array<Eigen::MatrixXd, 3> taps;
    Vector bias;

    int in_channels() const { return static_cast<int>(taps[0].cols()); }
    int out_channels() const { return static_cast<int>(taps[0].rows()); }

    static ConvLayer zeros(int out_ch, int in_ch) {
        ConvLayer layer;
        for (auto& w : layer.taps) w = Eigen::MatrixXd::Zero(out_ch, in_ch);
        layer.bias = Vector::Zero(out_ch);
        return layer;
    }

    // Kaiming-style init: N(0, 2 / fan_in) with fan_in = in_channels * 3.
    static ConvLayer randn(int out_ch, int in_ch, Rng& rng) {
        ConvLayer layer = zeros(out_ch, in_ch);
        const double stddev = std::sqrt(2.0 / (3.0 * in_ch));
        std::normal_distribution<double> dist(0.0, stddev);
        for (auto& w : layer.taps)
            for (int r = 0; r < out_ch; ++r)
                for (int c = 0; c < in_ch; ++c) w(r, c) = dist(rng);
        return layer;
    }
};

struct ConvGrads {
    std::array<Eigen::MatrixXd, 3> taps;
    Vector bias;

    static ConvGrads zeros_like(const ConvLayer& layer) {
        ConvGrads g;
        for (int k = 0; k < 3; ++k)
            g.taps[k] = Eigen::MatrixXd::Zero(layer.taps[k].rows(), layer.taps[k].cols());
        g.bias = Vector::Zero(layer.bias.size());
        return g;
    }

    void accumulate(const ConvGrads& other) {
        for (int k = 0; k < 3; ++k) taps[k] += other.taps[k];
        bias += other.bias;
    }

    void scale(double s) {
        for (auto& t : taps) t *= s;
        bias *= s;
    }
};

inline Tensor1D conv1d_forward(const ConvLayer& layer, const Tensor1D& x) {
    if (x.rows() != layer.in_channels())
        throw ShapeError("conv1d_forward: expected " + std::to_string(layer.in_channels()) +
                         " input channels, got " + std::to_string(x.rows()));
    if (x.cols() < 1) throw ShapeError("conv1d_forward: empty input");
    const auto L = x.cols();
    Tensor1D out = layer.bias.replicate(1, L);
    // k = 1 covers every column; k = 0 and k = 2 skip one boundary column.
    out += layer.taps[1] * x;
    if (L > 1) {
        out.rightCols(L - 1) += layer.taps[0] * x.leftCols(L - 1);
        out.leftCols(L - 1) += layer.taps[2] * x.rightCols(L - 1);
    }
    return out;
}

inline void conv1d_backward(const ConvLayer& layer, const Tensor1D& x,
                            const Tensor1D& grad_out, ConvGrads& grad_w, Tensor1D& grad_x) {
    if (x.rows() != layer.in_channels() || grad_out.rows() != layer.out_channels() ||
        grad_out.cols() != x.cols())
        throw ShapeError("conv1d_backward: shape mismatch");
    const auto L = x.cols();
    grad_w.bias = grad_out.rowwise().sum();
    grad_w.taps[1] = grad_out * x.transpose();
    grad_w.taps[0].setZero();
    grad_w.taps[2].setZero();
    grad_x = layer.taps[1].transpose() * grad_out;
    if (L > 1) {
        grad_w.taps[0] = grad_out.rightCols(L - 1) * x.leftCols(L - 1).transpose();
        grad_w.taps[2] = grad_out.leftCols(L - 1) * x.rightCols(L - 1).transpose();
        grad_x.leftCols(L - 1) += layer.taps[0].transpose() * grad_out.rightCols(L - 1);
        grad_x.rightCols(L - 1) += layer.taps[2].transpose() * grad_out.leftCols(L - 1);
    }
}

// ----------------------------------------------------------------------------
// LeakyReLU
// ----------------------------------------------------------------------------
inline Tensor1D leaky_relu(const Tensor1D& x, double slope) {
    if (slope <= 0.0 || slope >= 1.0) throw ArgumentError("leaky_relu: slope must be in (0,1)");
    return x.cwiseMax(slope * x);
}

// x_pre is the pre-activation input of the forward pass.
inline Tensor1D leaky_relu_backward(const Tensor1D& x_pre, const Tensor1D& grad_out, double slope) {
    return (x_pre.array() > 0.0).select(grad_out, slope * grad_out);
}

// ----------------------------------------------------------------------------
// Adam
// ----------------------------------------------------------------------------
struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Moment buffers for one flat parameter block.
struct AdamState {
    Eigen::ArrayXd m, v;
    long step = 0;
    AdamConfig cfg;

    explicit AdamState(Eigen::Index n, AdamConfig c = {})
        : m(Eigen::ArrayXd::Zero(n)), v(Eigen::ArrayXd::Zero(n)), cfg(c) {}

    void update(Eigen::Map<Eigen::ArrayXd> params, const Eigen::Map<const Eigen::ArrayXd> grads) {
        if (params.size() != m.size() || grads.size() != m.size())
            throw ShapeError("adam_step: parameter/moment size mismatch");
        ++step;
        m = cfg.beta1 * m + (1.0 - cfg.beta1) * grads;
        v = cfg.beta2 * v + (1.0 - cfg.beta2) * grads.square();
        const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        params -= cfg.lr * (m / bc1) / ((v / bc2).sqrt() + cfg.eps);
    }
};

inline void adam_step(AdamState& state, Eigen::MatrixXd& params, const Eigen::MatrixXd& grads) {
    state.update(Eigen::Map<Eigen::ArrayXd>(params.data(), params.size()),
                 Eigen::Map<const Eigen::ArrayXd>(grads.data(), grads.size()));
}

inline void adam_step(AdamState& state, Vector& params, const Vector& grads) {
    state.update(Eigen::Map<Eigen::ArrayXd>(params.data(), params.size()),
                 Eigen::Map<const Eigen::ArrayXd>(grads.data(), grads.size()));
}

// Adam buffers for a whole conv layer.
struct ConvAdam {
    std::array<AdamState, 3> taps;
    AdamState bias;

    ConvAdam(const ConvLayer& layer, AdamConfig cfg)
        : taps{AdamState(layer.taps[0].size(), cfg), AdamState(layer.taps[1].size(), cfg),
               AdamState(layer.taps[2].size(), cfg)},
          bias(layer.bias.size(), cfg) {}

    void apply(ConvLayer& layer, const ConvGrads& grads) {
        for (int k = 0; k < 3; ++k) adam_step(taps[k], layer.taps[k], grads.taps[k]);
        adam_step(bias, layer.bias, grads.bias);
    }
};

// ----------------------------------------------------------------------------
// Finite-difference gradient checking
// ----------------------------------------------------------------------------
struct ParamRef {
    std::string name;
    double* data;
    Eigen::Index size;
};

struct GradCheckEntry {
    std::string name;
    double max_rel_error;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;
    double max_rel_error = 0.0;
    bool passed(double tol) const { return max_rel_error < tol; }
};

// Central finite differences against analytic gradients. `loss` must be
// deterministic: it is evaluated twice at the base point and any disagreement
// raises DeterminismError. `analytic[i]` holds d loss / d params[i].
inline GradCheckReport grad_check(const std::function<double()>& loss,
                                  const std::vector<ParamRef>& params,
                                  const std::vector<std::vector<double>>& analytic,
                                  double h = 1e-5) {
    if (analytic.size() != params.size())
        throw ShapeError("grad_check: analytic gradient count mismatch");
    const double base1 = loss();
    const double base2 = loss();
    if (base1 != base2)
        throw DeterminismError("grad_check: loss closure is not deterministic");

    GradCheckReport report;
    for (size_t p = 0; p < params.size(); ++p) {
        const ParamRef& ref = params[p];
        if (static_cast<Eigen::Index>(analytic[p].size()) != ref.size)
            throw ShapeError("grad_check: gradient size mismatch for " + ref.name);
        double worst = 0.0;
        for (Eigen::Index i = 0; i < ref.size; ++i) {
            const double saved = ref.data[i];
            ref.data[i] = saved + h;
            const double fp = loss();
            ref.data[i] = saved - h;
            const double fm = loss();
            ref.data[i] = saved;
            const double fd = (fp - fm) / (2.0 * h);
            const double an = analytic[p][i];
            const double denom = std::max(std::abs(fd) + std::abs(an), 1e-8);
            worst = std::max(worst, std::abs(fd - an) / denom);
        }
        report.entries.push_back({ref.name, worst});
        report.max_rel_error = std::max(report.max_rel_error, worst);
    }
    return report;
}

}  // namespace tsglyph
