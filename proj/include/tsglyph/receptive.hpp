// ============================================================================
// receptive.hpp - pre-images of representation elements in the input series
//
// Receptive-field coordinates are composed layer by layer from (kernel,
// stride, padding) triples. Each encoder block contributes its convolution
// (k=3, s=1, p=1) followed by the downsampling step; the downsampler is
// modeled with kernel 2 so the span covers the retained sample for either
// phase. The decoder is the mirror image, so its output spans follow the same
// arithmetic.
// ============================================================================

#pragma once

#include <algorithm>
#include <vector>

#include "tsglyph/common.hpp"

namespace tsglyph {

struct LayerSpec {
    int kernel = 1;
    int stride = 1;
    int pad = 0;
};

struct LayerGeometry {
    std::vector<LayerSpec> layers;  // ordered from the input toward the representation

    static LayerGeometry encoder(int blocks) {
        LayerGeometry g;
        for (int b = 0; b < blocks; ++b) {
            g.layers.push_back({3, 1, 1});  // convolution
            g.layers.push_back({2, 2, 0});  // APS downsampling, either phase
        }
        return g;
    }

    // The decoder mirrors the encoder block for block, and the mirrored
    // coordinate arithmetic is identical.
    static LayerGeometry decoder(int blocks) { return encoder(blocks); }
};

struct PreImage {
    long start_raw = 0;  // leftmost input coordinate before clamping
    long end_raw = 0;    // rightmost input coordinate before clamping
    long start = 0;      // clamped to [0, input_length-1]
    long end = 0;
};

// Maps a representation span [v_L, u_L] back to input coordinates:
//   start = v_L * prod(s_i) - sum_l p_l * prod_{i<l} s_i
//   end   = u_L * prod(s_i) - sum_l (1 + p_l - k_l) * prod_{i<l} s_i
inline PreImage preimage(const LayerGeometry& geom, long v_L, long u_L, long input_length) {
    if (v_L < 0 || v_L > u_L) throw ArgumentError("preimage: need 0 <= v_L <= u_L");
    long stride_prod = 1;
    long start_off = 0;
    long end_off = 0;
    for (const auto& layer : geom.layers) {
        start_off += static_cast<long>(layer.pad) * stride_prod;
        end_off += static_cast<long>(1 + layer.pad - layer.kernel) * stride_prod;
        stride_prod *= layer.stride;
    }
    PreImage p;
    p.start_raw = v_L * stride_prod - start_off;
    p.end_raw = u_L * stride_prod - end_off;
    p.start = std::clamp(p.start_raw, 0L, input_length - 1);
    p.end = std::clamp(p.end_raw, 0L, input_length - 1);
    if (p.end_raw < 0 || p.start_raw > input_length - 1)
        throw ArgumentError("preimage: span lies entirely outside the input");
    return p;
}

// Span of representation elements [v_L, u_L] in the reconstruction produced by
// the mirrored decoder.
inline PreImage output_span(const LayerGeometry& geom, long v_L, long u_L, long output_length) {
    return preimage(geom, v_L, u_L, output_length);
}

}  // namespace tsglyph
