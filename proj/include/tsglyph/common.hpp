// ============================================================================
// common.hpp - shared types, errors and small helpers for the tsglyph library
// ============================================================================

#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cstdint>
#include <exception>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace tsglyph {

// A univariate-or-multichannel sequence: rows = channels, cols = time steps.
using Tensor1D = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ArgumentError : std::runtime_error {
    explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingError : std::runtime_error {
    int epoch;
    TrainingError(const std::string& msg, int epoch_idx)
        : std::runtime_error(msg), epoch(epoch_idx) {}
};

struct DeterminismError : std::runtime_error {
    explicit DeterminismError(const std::string& msg) : std::runtime_error(msg) {}
};

// Symbol rendering for codebook indices: a..z then A..Z, covers K <= 52.
inline char render_symbol(int index) {
    if (index < 0 || index >= 52)
        throw ArgumentError("symbol index out of renderable range: " + std::to_string(index));
    return index < 26 ? static_cast<char>('a' + index)
                      : static_cast<char>('A' + index - 26);
}

inline int parse_symbol(char c) {
    if (c >= 'a' && c <= 'z') return c - 'a';
    if (c >= 'A' && c <= 'Z') return c - 'A' + 26;
    throw FormatError(std::string("not a symbol character: ") + c);
}

// Runs fn(0..n-1) on a small worker pool (hardware concurrency, capped at n).
// Each index must be independent and internally seeded, so results do not
// depend on scheduling. The first exception thrown by any index is rethrown
// on the calling thread after all workers finish.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
    const int workers =
        std::min(n, static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    errors[static_cast<size_t>(i)] = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
}

// Length after one APS downsampling step.
inline int half_len(int len) { return (len + 1) / 2; }

// Representation length after b halvings.
inline int repr_length(int len, int blocks) {
    for (int b = 0; b < blocks; ++b) len = half_len(len);
    return len;
}

}  // namespace tsglyph
