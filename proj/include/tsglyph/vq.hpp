// ============================================================================
// vq.hpp - codebook, nearest-centroid quantization and the VQ loss terms
// ============================================================================

#pragma once

#include <utility>
#include <vector>

#include "tsglyph/common.hpp"

namespace tsglyph {

struct Codebook {
    Eigen::MatrixXd centroids;            // [K x Z]
    mutable std::vector<long> usage;      // quantized-point counts per centroid (diagnostic)

    int size() const { return static_cast<int>(centroids.rows()); }
    int dim() const { return static_cast<int>(centroids.cols()); }

    void reset_usage() const { usage.assign(static_cast<size_t>(size()), 0); }
};

// Standard normal entries drawn from the given generator.
inline Codebook init_codebook(int K, int Z, Rng& rng) {
    if (K < 1 || Z < 1) throw ArgumentError("init_codebook: K and Z must be >= 1");
    Codebook cb;
    cb.centroids.resize(K, Z);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int k = 0; k < K; ++k)
        for (int z = 0; z < Z; ++z) cb.centroids(k, z) = dist(rng);
    cb.reset_usage();
    return cb;
}

// Reproducible per seed.
inline Codebook init_codebook(int K, int Z, std::uint64_t seed) {
    Rng rng(seed);
    return init_codebook(K, Z, rng);
}

struct QuantizedSequence {
    std::vector<int> indices;   // length T', values in {0..K-1}
    Tensor1D vectors;           // [Z x T'], vectors.col(t) == centroids.row(indices[t])
    Tensor1D commit_input;      // [Z x T'], pre-quantization embeddings
};

// indices[t] = argmin_j ||e_t - c_j||^2, ties to the lowest index.
inline QuantizedSequence quantize(const Codebook& cb, const Tensor1D& embeddings) {
    if (embeddings.cols() < 1) throw ShapeError("quantize: empty embedding sequence");
    if (embeddings.rows() != cb.dim())
        throw ShapeError("quantize: embedding dim " + std::to_string(embeddings.rows()) +
                         " != codebook dim " + std::to_string(cb.dim()));
    if (cb.usage.size() != static_cast<size_t>(cb.size())) cb.reset_usage();

    const auto Tp = embeddings.cols();
    QuantizedSequence q;
    q.indices.resize(static_cast<size_t>(Tp));
    q.vectors.resize(embeddings.rows(), Tp);
    q.commit_input = embeddings;

    // Distances via ||c||^2 - 2 c.e (the ||e||^2 term is constant per column).
    const Vector c_sq = cb.centroids.rowwise().squaredNorm();
    Eigen::MatrixXd scores = (-2.0 * cb.centroids * embeddings).colwise() + c_sq;  // [K x T']
    for (Eigen::Index t = 0; t < Tp; ++t) {
        int best = 0;
        double best_score = scores(0, t);
        for (int k = 1; k < cb.size(); ++k) {
            if (scores(k, t) < best_score) {
                best_score = scores(k, t);
                best = k;
            }
        }
        q.indices[static_cast<size_t>(t)] = best;
        q.vectors.col(t) = cb.centroids.row(best).transpose();
        ++cb.usage[static_cast<size_t>(best)];
    }
    return q;
}

// Both terms share the value mean((e - e^q)^2); they differ only in which side
// the gradient flows through.
inline std::pair<double, double> vq_losses(const QuantizedSequence& q) {
    const double mse = (q.commit_input - q.vectors).array().square().mean();
    return {mse, mse};
}

// d codebook_loss / d centroids with sg[e] treated as constant.
inline Eigen::MatrixXd codebook_grad(const QuantizedSequence& q, int K) {
    const double scale = 2.0 / static_cast<double>(q.vectors.size());
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(K, q.vectors.rows());
    for (size_t t = 0; t < q.indices.size(); ++t) {
        const auto col = static_cast<Eigen::Index>(t);
        grad.row(q.indices[t]) +=
            scale * (q.vectors.col(col) - q.commit_input.col(col)).transpose();
    }
    return grad;
}

// d (beta * commitment_loss) / d embeddings with sg[e^q] treated as constant.
inline Tensor1D commitment_grad(const QuantizedSequence& q, double beta) {
    const double scale = 2.0 * beta / static_cast<double>(q.vectors.size());
    return scale * (q.commit_input - q.vectors);
}

// Straight-through estimator: the gradient at the quantized vectors is copied
// unchanged to the pre-quantization embeddings.
inline Tensor1D straight_through(const Tensor1D& grad_wrt_quantized) {
    return grad_wrt_quantized;
}

}  // namespace tsglyph
