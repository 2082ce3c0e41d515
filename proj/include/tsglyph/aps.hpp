// ============================================================================
// aps.hpp - adaptive polyphase downsampling / upsampling
//
// APS-D keeps the even or odd polyphase component with the larger L1 norm
// (ties go to the even phase). Odd-length inputs are edge-padded by repeating
// the last column so the output length is always ceil(L/2); the pad flag is
// recorded so APS-U can crop on the way back up. APS-U reinserts zeros in the
// phase recorded by the matching encoder block.
// ============================================================================

#pragma once

#include <vector>

#include "tsglyph/common.hpp"

namespace tsglyph {

struct PhaseRecord {
    struct Entry {
        int phase = 0;          // retained polyphase component, 0 = even
        bool prepadded = false; // input was edge-padded to even length
        int input_length = 0;   // length before padding
    };
    std::vector<Entry> blocks;  // one entry per encoder block, index 0 = first block
};

struct ApsDownResult {
    Tensor1D out;
    PhaseRecord::Entry entry;
};

namespace detail {

inline Tensor1D edge_pad_even(const Tensor1D& s, bool& padded) {
    padded = (s.cols() % 2) != 0;
    if (!padded) return s;
    Tensor1D p(s.rows(), s.cols() + 1);
    p.leftCols(s.cols()) = s;
    p.col(s.cols()) = s.col(s.cols() - 1);
    return p;
}

inline Tensor1D take_phase(const Tensor1D& even_padded, int phase) {
    const auto half = even_padded.cols() / 2;
    Tensor1D out(even_padded.rows(), half);
    for (Eigen::Index t = 0; t < half; ++t) out.col(t) = even_padded.col(2 * t + phase);
    return out;
}

}  // namespace detail

inline Tensor1D aps_down_pinned(const Tensor1D& s, int phase, bool* prepadded = nullptr) {
    if (s.cols() < 2) throw ShapeError("aps_down: sequence length must be >= 2");
    bool padded = false;
    const Tensor1D p = detail::edge_pad_even(s, padded);
    if (prepadded) *prepadded = padded;
    return detail::take_phase(p, phase);
}

inline ApsDownResult aps_down(const Tensor1D& s) {
    if (s.cols() < 2) throw ShapeError("aps_down: sequence length must be >= 2");
    bool padded = false;
    const Tensor1D p = detail::edge_pad_even(s, padded);
    const Tensor1D even = detail::take_phase(p, 0);
    const Tensor1D odd = detail::take_phase(p, 1);
    const double n0 = even.cwiseAbs().sum();
    const double n1 = odd.cwiseAbs().sum();
    ApsDownResult res;
    res.entry.phase = (n1 > n0) ? 1 : 0;
    res.entry.prepadded = padded;
    res.entry.input_length = static_cast<int>(s.cols());
    res.out = res.entry.phase == 0 ? even : odd;
    return res;
}

// Scatters the output gradient back to the retained input indices. The padded
// duplicate column folds its gradient into the true last column.
inline Tensor1D aps_down_backward(const Tensor1D& grad_out, const PhaseRecord::Entry& entry) {
    const int L = entry.input_length;
    Tensor1D grad_in = Tensor1D::Zero(grad_out.rows(), L);
    for (Eigen::Index t = 0; t < grad_out.cols(); ++t) {
        const int src = 2 * static_cast<int>(t) + entry.phase;
        grad_in.col(src < L ? src : L - 1) += grad_out.col(t);
    }
    return grad_in;
}

inline Tensor1D aps_up(const Tensor1D& s, int phase, int target_length) {
    const int doubled = 2 * static_cast<int>(s.cols());
    if (target_length != doubled && target_length != doubled - 1)
        throw ShapeError("aps_up: target length " + std::to_string(target_length) +
                         " incompatible with input length " + std::to_string(s.cols()));
    Tensor1D out = Tensor1D::Zero(s.rows(), target_length);
    for (Eigen::Index t = 0; t < s.cols(); ++t) {
        const int dst = 2 * static_cast<int>(t) + phase;
        if (dst < target_length) out.col(dst) = s.col(t);
    }
    return out;
}

inline Tensor1D aps_up_backward(const Tensor1D& grad_out, int phase, Eigen::Index source_length) {
    Tensor1D grad_in = Tensor1D::Zero(grad_out.rows(), source_length);
    for (Eigen::Index t = 0; t < source_length; ++t) {
        const int dst = 2 * static_cast<int>(t) + phase;
        if (dst < grad_out.cols()) grad_in.col(t) = grad_out.col(dst);
    }
    return grad_in;
}

}  // namespace tsglyph
