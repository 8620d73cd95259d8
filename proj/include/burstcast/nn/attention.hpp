#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace burstcast::nn {

/// Additive attention scorer: e_t = v . tanh(W h_t). W is hidden x width
/// (input-major), v has `width` entries.
struct AttentionWeights {
    std::span<const double> w;
    std::span<const double> v;
    std::size_t hidden = 0;
    std::size_t width = 0;
};

struct AttentionGrads {
    std::span<double> w;
    std::span<double> v;
};

struct AttentionParams {
    std::size_t hidden = 0;
    std::size_t width = 0;
    std::vector<double> w;
    std::vector<double> v;

    AttentionWeights view() const { return {w, v, hidden, width}; }
};

/// Softmax with max subtraction.
std::vector<double> softmax(std::span<const double> scores);

struct AttentionTrace {
    std::vector<double> u;       // L x width, tanh(W h_t)
    std::vector<double> scores;  // L
    std::vector<double> alpha;   // L
};

void attention_forward(const AttentionWeights& w, const double* H, std::size_t L, std::size_t h_stride,
                       double* context, AttentionTrace& trace);

/// Accumulates parameter gradients into `g` and dLoss/dh_t into dH.
void attention_backward(const AttentionWeights& w, const AttentionGrads& g, const double* H, std::size_t L,
                        std::size_t h_stride, const AttentionTrace& trace, const double* dcontext, double* dH,
                        std::size_t dh_stride);

struct AttentionResult {
    std::vector<double> context;
    std::vector<double> weights;
};

/// Checked entry point over an L x hidden row-major block of hidden states.
AttentionResult additive_attention(std::span<const double> H, std::size_t L, const AttentionParams& params);

}  // namespace burstcast::nn
