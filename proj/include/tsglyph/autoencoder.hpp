// ============================================================================
// autoencoder.hpp - shift-equivariant convolutional autoencoder with a
// vector-quantized bottleneck
//
// Encoder block: conv(3,1,1) -> APS-D -> LeakyReLU. Decoder block: APS-U ->
// conv(3,1,1) -> LeakyReLU (the last block stays linear). The quantization
// bottleneck sits between the two stacks; training minimizes
//   ||x - psi(E^q)||^2 + ||sg[phi(x)] - E^q||^2 + beta ||phi(x) - sg[E^q]||^2
// with straight-through gradients through the quantizer. All reductions are
// means over the reduced axes.
// ============================================================================

#pragma once

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tsglyph/aps.hpp"
#include "tsglyph/common.hpp"
#include "tsglyph/dataset.hpp"
#include "tsglyph/receptive.hpp"
#include "tsglyph/tensor.hpp"
#include "tsglyph/vq.hpp"

namespace tsglyph {

enum class CodebookSolver { adam, sgd };

struct ModelConfig {
    int depth = 1;               // number of encoder blocks B
    int channels = 64;           // latent width Z
    int codebook_size = 32;      // K
    double beta = 0.25;          // commitment weight
    double lr = 1e-3;            // Adam learning rate
    int epochs = 1000;
    int batch_size = 0;          // 0 = full batch if N <= 512, else 128
    std::uint64_t seed = 0;
    double leaky_slope = 0.01;
    int early_stop_patience = 100;
    int min_repr_length = 4;
    CodebookSolver codebook_solver = CodebookSolver::adam;
    double codebook_lr = 0.0;    // SGD only; 0 = 0.5 * lr
    bool codebook_restarts = true;  // reseat unused centroids onto encoder outputs

    void validate(int series_length) const {
        if (depth < 1) throw ArgumentError("config: depth must be >= 1");
        if (channels < 1 || codebook_size < 2) throw ArgumentError("config: bad channels/codebook");
        if (beta <= 0.0) throw ArgumentError("config: beta must be > 0");
        if (repr_length(series_length, depth) < min_repr_length)
            throw ArgumentError("config: depth " + std::to_string(depth) +
                                " leaves representation shorter than " +
                                std::to_string(min_repr_length));
    }
};

// Largest usable depth for a series length: representation stays at least
// min_repr_length samples long, capped at 5.
inline int max_depth(int series_length, int min_repr_length = 4, int cap = 5) {
    int d = 0;
    int len = series_length;
    while (d < cap && half_len(len) >= min_repr_length) {
        len = half_len(len);
        ++d;
    }
    return d;
}

struct SymbolicRepresentation {
    std::vector<int> indices;  // length T', values in {0..K-1}
    PhaseRecord phases;
    int source_length = 0;
    int depth = 0;

    std::string to_string() const {
        std::string s;
        s.reserve(indices.size());
        for (int i : indices) s.push_back(render_symbol(i));
        return s;
    }
};

struct TrainedModel {
    ModelConfig config;
    std::vector<ConvLayer> encoder;  // encoder[0] maps 1 -> Z, the rest Z -> Z
    std::vector<ConvLayer> decoder;  // decoder[last] maps Z -> 1, the rest Z -> Z
    Codebook codebook;
    std::vector<double> loss_trace;  // mean total loss per epoch
    int trained_length = 0;
};

// ----------------------------------------------------------------------------
// Forward passes with caches for backprop
// ----------------------------------------------------------------------------
struct EncodeCache {
    std::vector<Tensor1D> conv_in;   // per block
    std::vector<Tensor1D> conv_out;  // per block, pre-APS
    std::vector<Tensor1D> down_out;  // per block, pre-activation
    PhaseRecord phases;
    Tensor1D embeddings;             // [Z x T']
};

namespace detail {

inline void check_depth(int series_length, int depth) {
    // Every intermediate sequence must still be splittable.
    if (repr_length(series_length, depth - 1) < 2)
        throw ArgumentError("series of length " + std::to_string(series_length) +
                            " too short for depth " + std::to_string(depth));
}

inline Tensor1D as_row(const std::vector<double>& values) {
    Tensor1D x(1, static_cast<Eigen::Index>(values.size()));
    for (size_t t = 0; t < values.size(); ++t) x(0, static_cast<Eigen::Index>(t)) = values[t];
    return x;
}

}  // namespace detail

// Pass `pinned` to force the recorded phases instead of the norm-based choice.
inline EncodeCache encode_forward(const TrainedModel& model, const std::vector<double>& x,
                                  const PhaseRecord* pinned = nullptr) {
    const int B = model.config.depth;
    detail::check_depth(static_cast<int>(x.size()), B);
    if (pinned && static_cast<int>(pinned->blocks.size()) != B)
        throw ShapeError("encode: pinned phase record depth mismatch");

    EncodeCache cache;
    Tensor1D cur = detail::as_row(x);
    for (int b = 0; b < B; ++b) {
        cache.conv_in.push_back(cur);
        Tensor1D conv = conv1d_forward(model.encoder[static_cast<size_t>(b)], cur);
        cache.conv_out.push_back(conv);
        PhaseRecord::Entry entry;
        Tensor1D down;
        if (pinned) {
            entry = pinned->blocks[static_cast<size_t>(b)];
            entry.input_length = static_cast<int>(conv.cols());
            down = aps_down_pinned(conv, entry.phase, &entry.prepadded);
        } else {
            ApsDownResult res = aps_down(conv);
            entry = res.entry;
            down = std::move(res.out);
        }
        cache.down_out.push_back(down);
        cache.phases.blocks.push_back(entry);
        cur = leaky_relu(down, model.config.leaky_slope);
    }
    cache.embeddings = cur;
    return cache;
}

inline std::pair<Tensor1D, PhaseRecord> encode(const TrainedModel& model,
                                               const std::vector<double>& x) {
    EncodeCache cache = encode_forward(model, x);
    return {cache.embeddings, cache.phases};
}

inline Tensor1D encode_pinned(const TrainedModel& model, const std::vector<double>& x,
                              const PhaseRecord& phases) {
    return encode_forward(model, x, &phases).embeddings;
}

inline SymbolicRepresentation represent(const TrainedModel& model, const std::vector<double>& x) {
    EncodeCache cache = encode_forward(model, x);
    QuantizedSequence q = quantize(model.codebook, cache.embeddings);
    SymbolicRepresentation rep;
    rep.indices = std::move(q.indices);
    rep.phases = std::move(cache.phases);
    rep.source_length = static_cast<int>(x.size());
    rep.depth = model.config.depth;
    return rep;
}

// Phase record with a fixed phase at every block, as produced by encoding a
// length-T series whose polyphase choice always lands on `phase`.
inline PhaseRecord canonical_phases(int series_length, int depth, int phase = 0) {
    PhaseRecord pr;
    int len = series_length;
    for (int b = 0; b < depth; ++b) {
        PhaseRecord::Entry entry;
        entry.phase = phase;
        entry.input_length = len;
        entry.prepadded = (len % 2) != 0;
        pr.blocks.push_back(entry);
        len = half_len(len);
    }
    return pr;
}

struct DecodeCache {
    std::vector<Tensor1D> up_in;     // per decoder block
    std::vector<Tensor1D> up_out;    // after zero insertion
    std::vector<Tensor1D> conv_out;  // pre-activation
    Tensor1D output;                 // [1 x T]
};

// `vectors` is the quantized sequence [Z x T']; phases must come from the
// matching encoder pass (block 0 = first encoder block).
inline DecodeCache decode_forward(const TrainedModel& model, const Tensor1D& vectors,
                                  const PhaseRecord& phases, int target_length) {
    const int B = model.config.depth;
    if (static_cast<int>(phases.blocks.size()) != B)
        throw ShapeError("decode: phase record depth mismatch");
    if (vectors.cols() != repr_length(target_length, B))
        throw ShapeError("decode: sequence length " + std::to_string(vectors.cols()) +
                         " inconsistent with target length " + std::to_string(target_length));

    // Length chain L_0 = T, L_{j+1} = ceil(L_j / 2).
    std::vector<int> lengths(static_cast<size_t>(B) + 1);
    lengths[0] = target_length;
    for (int j = 0; j < B; ++j) lengths[static_cast<size_t>(j) + 1] = half_len(lengths[static_cast<size_t>(j)]);

    DecodeCache cache;
    Tensor1D cur = vectors;
    for (int b = 0; b < B; ++b) {
        const int enc_block = B - 1 - b;  // mirrored encoder block
        const auto& entry = phases.blocks[static_cast<size_t>(enc_block)];
        cache.up_in.push_back(cur);
        Tensor1D up = aps_up(cur, entry.phase, lengths[static_cast<size_t>(enc_block)]);
        cache.up_out.push_back(up);
        Tensor1D conv = conv1d_forward(model.decoder[static_cast<size_t>(b)], up);
        cache.conv_out.push_back(conv);
        cur = (b == B - 1) ? conv : leaky_relu(conv, model.config.leaky_slope);
    }
    cache.output = cur;
    return cache;
}

inline Tensor1D decode(const TrainedModel& model, const Tensor1D& vectors,
                       const PhaseRecord& phases, int target_length) {
    return decode_forward(model, vectors, phases, target_length).output;
}

inline Tensor1D centroid_sequence(const TrainedModel& model, const std::vector<int>& indices) {
    Tensor1D vectors(model.config.channels, static_cast<Eigen::Index>(indices.size()));
    for (size_t t = 0; t < indices.size(); ++t) {
        if (indices[t] < 0 || indices[t] >= model.codebook.size())
            throw ArgumentError("decode: index out of codebook range");
        vectors.col(static_cast<Eigen::Index>(t)) = model.codebook.centroids.row(indices[t]).transpose();
    }
    return vectors;
}

inline Tensor1D decode(const TrainedModel& model, const std::vector<int>& indices,
                       const PhaseRecord& phases, int target_length) {
    return decode(model, centroid_sequence(model, indices), phases, target_length);
}

struct PartialDecode {
    std::vector<double> segment;
    long t_start = 0;  // inclusive input-time span of the kept elements
    long t_end = 0;
};

// Keeps representation positions [keep_begin, keep_end], replaces the rest by
// zero vectors, decodes with the recorded phases, and crops the reconstruction
// to the output receptive span of the kept positions.
inline PartialDecode decode_partial(const TrainedModel& model, const SymbolicRepresentation& rep,
                                    int keep_begin, int keep_end) {
    const int Tp = static_cast<int>(rep.indices.size());
    if (keep_begin < 0 || keep_end < keep_begin || keep_end >= Tp)
        throw ArgumentError("decode_partial: keep range out of bounds");
    Tensor1D vectors = Tensor1D::Zero(model.config.channels, Tp);
    for (int t = keep_begin; t <= keep_end; ++t)
        vectors.col(t) = model.codebook.centroids.row(rep.indices[static_cast<size_t>(t)]).transpose();
    const Tensor1D full = decode(model, vectors, rep.phases, rep.source_length);
    const PreImage span = output_span(LayerGeometry::decoder(model.config.depth), keep_begin,
                                      keep_end, rep.source_length);
    PartialDecode out;
    out.t_start = span.start;
    out.t_end = span.end;
    out.segment.reserve(static_cast<size_t>(span.end - span.start + 1));
    for (long t = span.start; t <= span.end; ++t) out.segment.push_back(full(0, t));
    return out;
}

// ----------------------------------------------------------------------------
// Training
// ----------------------------------------------------------------------------
struct InstanceGrads {
    std::vector<ConvGrads> encoder;
    std::vector<ConvGrads> decoder;
    Eigen::MatrixXd codebook;

    static InstanceGrads zeros_like(const TrainedModel& m) {
        InstanceGrads g;
        for (const auto& layer : m.encoder) g.encoder.push_back(ConvGrads::zeros_like(layer));
        for (const auto& layer : m.decoder) g.decoder.push_back(ConvGrads::zeros_like(layer));
        g.codebook = Eigen::MatrixXd::Zero(m.codebook.size(), m.codebook.dim());
        return g;
    }

    void accumulate(const InstanceGrads& other) {
        for (size_t i = 0; i < encoder.size(); ++i) encoder[i].accumulate(other.encoder[i]);
        for (size_t i = 0; i < decoder.size(); ++i) decoder[i].accumulate(other.decoder[i]);
        codebook += other.codebook;
    }

    void scale(double s) {
        for (auto& g : encoder) g.scale(s);
        for (auto& g : decoder) g.scale(s);
        codebook *= s;
    }
};

struct LossTerms {
    double reconstruction = 0.0;
    double codebook = 0.0;
    double commitment = 0.0;
    double total(double beta) const { return reconstruction + codebook + beta * commitment; }
};

// Forward + backward for a single instance. Gradients are written into `grads`
// (overwriting encoder/decoder entries, accumulating nothing). When
// `pinned_phases` is given the APS phases are forced, which makes the pass a
// deterministic function of the parameters (used by gradient checks).
inline LossTerms backprop_instance(const TrainedModel& model, const std::vector<double>& x,
                                   InstanceGrads& grads,
                                   const PhaseRecord* pinned_phases = nullptr) {
    const int B = model.config.depth;
    const double slope = model.config.leaky_slope;
    const int T = static_cast<int>(x.size());

    EncodeCache enc = encode_forward(model, x, pinned_phases);
    QuantizedSequence q = quantize(model.codebook, enc.embeddings);
    DecodeCache dec = decode_forward(model, q.vectors, enc.phases, T);

    LossTerms losses;
    const Tensor1D target = detail::as_row(x);
    const Tensor1D diff = dec.output - target;
    losses.reconstruction = diff.array().square().mean();
    const auto [cb_loss, commit_loss] = vq_losses(q);
    losses.codebook = cb_loss;
    losses.commitment = commit_loss;

    // Reconstruction gradient back through the decoder.
    Tensor1D g = (2.0 / T) * diff;
    for (int b = B - 1; b >= 0; --b) {
        const auto bi = static_cast<size_t>(b);
        if (b != B - 1) g = leaky_relu_backward(dec.conv_out[bi], g, slope);
        Tensor1D g_up;
        conv1d_backward(model.decoder[bi], dec.up_out[bi], g, grads.decoder[bi], g_up);
        const int enc_block = B - 1 - b;
        g = aps_up_backward(g_up, enc.phases.blocks[static_cast<size_t>(enc_block)].phase,
                            dec.up_in[bi].cols());
    }

    // Straight-through: the gradient at the quantized vectors transfers to the
    // embeddings; the commitment term adds its pull toward the centroids.
    g = straight_through(g) + commitment_grad(q, model.config.beta);
    for (int b = B - 1; b >= 0; --b) {
        const auto bi = static_cast<size_t>(b);
        g = leaky_relu_backward(enc.down_out[bi], g, slope);
        g = aps_down_backward(g, enc.phases.blocks[bi]);
        Tensor1D g_in;
        conv1d_backward(model.encoder[bi], enc.conv_in[bi], g, grads.encoder[bi], g_in);
        g = std::move(g_in);
    }

    grads.codebook = codebook_grad(q, model.codebook.size());
    return losses;
}

inline TrainedModel init_model(const ModelConfig& cfg, int series_length) {
    cfg.validate(series_length);
    TrainedModel model;
    model.config = cfg;
    model.trained_length = series_length;
    Rng rng(cfg.seed);
    const int Z = cfg.channels;
    for (int b = 0; b < cfg.depth; ++b)
        model.encoder.push_back(ConvLayer::randn(Z, b == 0 ? 1 : Z, rng));
    for (int b = 0; b < cfg.depth; ++b)
        model.decoder.push_back(ConvLayer::randn(b == cfg.depth - 1 ? 1 : Z, Z, rng));
    model.codebook = init_codebook(cfg.codebook_size, Z, rng);
    return model;
}

inline TrainedModel train(const TimeSeriesDataset& ds, const ModelConfig& cfg) {
    if (ds.train.empty()) throw ArgumentError("train: empty training split");
    const int T = static_cast<int>(ds.train.front().values.size());
    TrainedModel model = init_model(cfg, T);

    const int N = static_cast<int>(ds.train.size());
    const int batch = cfg.batch_size > 0 ? cfg.batch_size : (N <= 512 ? N : 128);
    const double cb_lr = cfg.codebook_lr > 0.0 ? cfg.codebook_lr : 0.5 * cfg.lr;

    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    std::vector<ConvAdam> enc_opt, dec_opt;
    for (const auto& layer : model.encoder) enc_opt.emplace_back(layer, adam_cfg);
    for (const auto& layer : model.decoder) dec_opt.emplace_back(layer, adam_cfg);
    AdamState cb_opt(model.codebook.centroids.size(), adam_cfg);

    Rng shuffle_rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    Rng restart_rng(cfg.seed ^ 0xd1b54a32d192ed03ULL);
    model.codebook.reset_usage();
    std::vector<int> order(static_cast<size_t>(N));
    std::iota(order.begin(), order.end(), 0);

    double best_loss = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    InstanceGrads batch_grads = InstanceGrads::zeros_like(model);
    InstanceGrads inst_grads = InstanceGrads::zeros_like(model);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (batch < N) std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (int start = 0; start < N; start += batch) {
            const int count = std::min(batch, N - start);
            batch_grads.scale(0.0);
            for (int i = 0; i < count; ++i) {
                const auto& x = ds.train[static_cast<size_t>(order[static_cast<size_t>(start + i)])].values;
                const LossTerms losses = backprop_instance(model, x, inst_grads);
                epoch_loss += losses.total(cfg.beta);
                batch_grads.accumulate(inst_grads);
            }
            batch_grads.scale(1.0 / count);
            for (size_t b = 0; b < model.encoder.size(); ++b)
                enc_opt[b].apply(model.encoder[b], batch_grads.encoder[b]);
            for (size_t b = 0; b < model.decoder.size(); ++b)
                dec_opt[b].apply(model.decoder[b], batch_grads.decoder[b]);
            if (cfg.codebook_solver == CodebookSolver::adam)
                adam_step(cb_opt, model.codebook.centroids, batch_grads.codebook);
            else
                model.codebook.centroids -= cb_lr * batch_grads.codebook;
        }
        epoch_loss /= N;
        if (!std::isfinite(epoch_loss))
            throw TrainingError("training diverged at epoch " + std::to_string(epoch), epoch);
        model.loss_trace.push_back(epoch_loss);

        // Unused centroids receive no gradient and would stay dead forever;
        // reseat each one onto a random encoder output so the whole codebook
        // stays reachable. Disabled near the end so the loss can settle.
        if (cfg.codebook_restarts && epoch < (3 * cfg.epochs) / 4) {
            std::vector<int> dead;
            for (int k = 0; k < model.codebook.size(); ++k)
                if (model.codebook.usage[static_cast<size_t>(k)] == 0) dead.push_back(k);
            if (!dead.empty()) {
                std::uniform_int_distribution<int> pick_series(0, N - 1);
                for (int k : dead) {
                    const auto& x = ds.train[static_cast<size_t>(pick_series(restart_rng))].values;
                    EncodeCache cache = encode_forward(model, x);
                    std::uniform_int_distribution<Eigen::Index> pick_col(0, cache.embeddings.cols() - 1);
                    model.codebook.centroids.row(k) =
                        cache.embeddings.col(pick_col(restart_rng)).transpose();
                }
            }
        }
        model.codebook.reset_usage();

        if (epoch_loss < best_loss) {
            best_loss = epoch_loss;
            best_epoch = epoch;
        } else if (epoch - best_epoch >= cfg.early_stop_patience) {
            break;
        }
    }
    model.codebook.reset_usage();
    return model;
}

// ----------------------------------------------------------------------------
// Reconstruction error helper
// ----------------------------------------------------------------------------
inline double pointwise_mae(const TrainedModel& model, const std::vector<TimeSeries>& split) {
    if (split.empty()) throw ArgumentError("pointwise_mae: empty split");
    double total = 0.0;
    long count = 0;
    for (const auto& ts : split) {
        EncodeCache enc = encode_forward(model, ts.values);
        QuantizedSequence q = quantize(model.codebook, enc.embeddings);
        Tensor1D xhat = decode(model, q.vectors, enc.phases, static_cast<int>(ts.values.size()));
        for (size_t t = 0; t < ts.values.size(); ++t)
            total += std::abs(xhat(0, static_cast<Eigen::Index>(t)) - ts.values[t]);
        count += static_cast<long>(ts.values.size());
    }
    return total / count;
}

// ----------------------------------------------------------------------------
// Receptive-field perturbation oracle (phases pinned)
// ----------------------------------------------------------------------------
// Checks that perturbing input samples outside the computed pre-image leaves
// the embedding at `position` unchanged, and that a perturbation at the
// pre-image center does move it.
inline bool verify_preimage(const TrainedModel& model, const std::vector<double>& x, int position,
                            std::uint64_t seed = 0, int n_perturbations = 100,
                            double tol = 1e-9) {
    EncodeCache base = encode_forward(model, x);
    if (position < 0 || position >= base.embeddings.cols())
        throw ArgumentError("verify_preimage: position out of range");
    const Vector base_col = base.embeddings.col(position);
    const long T = static_cast<long>(x.size());
    const PreImage span =
        preimage(LayerGeometry::encoder(model.config.depth), position, position, T);

    std::vector<long> outside;
    for (long t = 0; t < T; ++t)
        if (t < span.start || t > span.end) outside.push_back(t);

    Rng rng(seed);
    std::uniform_real_distribution<double> delta(-1.0, 1.0);
    if (!outside.empty()) {
        std::uniform_int_distribution<size_t> pick(0, outside.size() - 1);
        std::vector<double> perturbed = x;
        for (int i = 0; i < n_perturbations; ++i) {
            const long t = outside[pick(rng)];
            const double saved = perturbed[static_cast<size_t>(t)];
            perturbed[static_cast<size_t>(t)] = saved + delta(rng);
            const Tensor1D emb = encode_pinned(model, perturbed, base.phases);
            perturbed[static_cast<size_t>(t)] = saved;
            if ((emb.col(position) - base_col).cwiseAbs().maxCoeff() >= tol) return false;
        }
    }

    // Inside perturbation must reach the embedding for a generic model.
    std::vector<double> perturbed = x;
    const long center = (span.start + span.end) / 2;
    perturbed[static_cast<size_t>(center)] += 1.0;
    const Tensor1D emb = encode_pinned(model, perturbed, base.phases);
    return (emb.col(position) - base_col).norm() > 0.0;
}

// ----------------------------------------------------------------------------
// Serialization
// ----------------------------------------------------------------------------
namespace detail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    std::vector<double> flat(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            flat[static_cast<size_t>(r * m.cols() + c)] = m(r, c);
    j["data"] = flat;
    return j;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    const Eigen::Index rows = j.at("rows"), cols = j.at("cols");
    const auto flat = j.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(flat.size()) != rows * cols)
        throw FormatError("model file: matrix shape/data mismatch");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<size_t>(r * cols + c)];
    return m;
}

inline nlohmann::json conv_to_json(const ConvLayer& layer) {
    nlohmann::json j;
    j["taps"] = {matrix_to_json(layer.taps[0]), matrix_to_json(layer.taps[1]),
                 matrix_to_json(layer.taps[2])};
    j["bias"] = std::vector<double>(layer.bias.data(), layer.bias.data() + layer.bias.size());
    return j;
}

inline ConvLayer conv_from_json(const nlohmann::json& j) {
    ConvLayer layer;
    for (int k = 0; k < 3; ++k) layer.taps[static_cast<size_t>(k)] = matrix_from_json(j.at("taps").at(k));
    const auto bias = j.at("bias").get<std::vector<double>>();
    layer.bias = Eigen::Map<const Vector>(bias.data(), static_cast<Eigen::Index>(bias.size()));
    return layer;
}

}  // namespace detail

inline constexpr const char* kModelMagic = "tsglyph-model";
inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["magic"] = kModelMagic;
    j["format_version"] = kModelFormatVersion;
    j["config"] = {
        {"depth", model.config.depth},
        {"channels", model.config.channels},
        {"codebook_size", model.config.codebook_size},
        {"beta", model.config.beta},
        {"lr", model.config.lr},
        {"epochs", model.config.epochs},
        {"batch_size", model.config.batch_size},
        {"seed", model.config.seed},
        {"leaky_slope", model.config.leaky_slope},
        {"early_stop_patience", model.config.early_stop_patience},
        {"min_repr_length", model.config.min_repr_length},
        {"codebook_solver", model.config.codebook_solver == CodebookSolver::adam ? "adam" : "sgd"},
        {"codebook_lr", model.config.codebook_lr},
        {"codebook_restarts", model.config.codebook_restarts},
    };
    j["trained_length"] = model.trained_length;
    j["encoder_weights"] = nlohmann::json::array();
    for (const auto& layer : model.encoder) j["encoder_weights"].push_back(detail::conv_to_json(layer));
    j["decoder_weights"] = nlohmann::json::array();
    for (const auto& layer : model.decoder) j["decoder_weights"].push_back(detail::conv_to_json(layer));
    j["codebook"] = detail::matrix_to_json(model.codebook.centroids);
    j["loss_trace"] = model.loss_trace;
    j["seed"] = model.config.seed;
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("magic") || j.at("magic") != kModelMagic)
        throw FormatError("not a tsglyph model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion)
        throw FormatError("unsupported model format version");
    TrainedModel model;
    const auto& c = j.at("config");
    model.config.depth = c.at("depth");
    model.config.channels = c.at("channels");
    model.config.codebook_size = c.at("codebook_size");
    model.config.beta = c.at("beta");
    model.config.lr = c.at("lr");
    model.config.epochs = c.at("epochs");
    model.config.batch_size = c.at("batch_size");
    model.config.seed = c.at("seed");
    model.config.leaky_slope = c.at("leaky_slope");
    model.config.early_stop_patience = c.at("early_stop_patience");
    model.config.min_repr_length = c.at("min_repr_length");
    model.config.codebook_solver =
        c.at("codebook_solver") == "adam" ? CodebookSolver::adam : CodebookSolver::sgd;
    model.config.codebook_lr = c.at("codebook_lr");
    if (c.contains("codebook_restarts")) model.config.codebook_restarts = c.at("codebook_restarts");
    model.trained_length = j.at("trained_length");
    for (const auto& lj : j.at("encoder_weights")) model.encoder.push_back(detail::conv_from_json(lj));
    for (const auto& lj : j.at("decoder_weights")) model.decoder.push_back(detail::conv_from_json(lj));
    model.codebook.centroids = detail::matrix_from_json(j.at("codebook"));
    model.codebook.reset_usage();
    model.loss_trace = j.at("loss_trace").get<std::vector<double>>();
    return model;
}

inline void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write model file: " + path);
    out << model_to_json(model).dump(2) << '\n';
}

inline TrainedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("corrupt model file " + path + ": " + e.what());
    }
    try {
        return model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("corrupt model file " + path + ": " + e.what());
    }
}

}  // namespace tsglyph
