#include "burstcast/nn/attention.hpp"

#include <algorithm>
#include <cmath>

#include "burstcast/core/error.hpp"
#include "burstcast/nn/kernels.hpp"

namespace burstcast::nn {

using kernels::axpy;
using kernels::dot;

std::vector<double> softmax(std::span<const double> scores) {
    if (scores.empty()) return {};
    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - mx);
        sum += out[i];
    }
    for (double& a : out) a /= sum;
    return out;
}

void attention_forward(const AttentionWeights& w, const double* H, std::size_t L, std::size_t h_stride,
                       double* context, AttentionTrace& tr) {
    const std::size_t d = w.hidden;
    const std::size_t A = w.width;
    tr.u.assign(L * A, 0.0);
    tr.scores.resize(L);
    for (std::size_t t = 0; t < L; ++t) {
        double* u = tr.u.data() + t * A;
        const double* h = H + t * h_stride;
        for (std::size_t j = 0; j < d; ++j) axpy(h[j], w.w.data() + j * A, u, A);
        for (std::size_t a = 0; a < A; ++a) u[a] = std::tanh(u[a]);
        tr.scores[t] = dot(w.v.data(), u, A);
    }
    tr.alpha = softmax(tr.scores);
    std::fill(context, context + d, 0.0);
    for (std::size_t t = 0; t < L; ++t) axpy(tr.alpha[t], H + t * h_stride, context, d);
}

void attention_backward(const AttentionWeights& w, const AttentionGrads& g, const double* H, std::size_t L,
                        std::size_t h_stride, const AttentionTrace& tr, const double* dctx, double* dH,
                        std::size_t dh_stride) {
    const std::size_t d = w.hidden;
    const std::size_t A = w.width;
    std::vector<double> dalpha(L);
    double weighted = 0.0;
    for (std::size_t t = 0; t < L; ++t) {
        dalpha[t] = dot(dctx, H + t * h_stride, d);
        weighted += tr.alpha[t] * dalpha[t];
        axpy(tr.alpha[t], dctx, dH + t * dh_stride, d);
    }
    std::vector<double> dpre(A);
    for (std::size_t t = 0; t < L; ++t) {
        const double de = tr.alpha[t] * (dalpha[t] - weighted);
        const double* u = tr.u.data() + t * A;
        axpy(de, u, g.v.data(), A);
        for (std::size_t a = 0; a < A; ++a) dpre[a] = de * w.v[a] * (1.0 - u[a] * u[a]);
        const double* h = H + t * h_stride;
        double* dh = dH + t * dh_stride;
        for (std::size_t j = 0; j < d; ++j) {
            axpy(h[j], dpre.data(), g.w.data() + j * A, A);
            dh[j] += dot(w.w.data() + j * A, dpre.data(), A);
        }
    }
}

AttentionResult additive_attention(std::span<const double> H, std::size_t L, const AttentionParams& p) {
    if (L == 0) throw ShapeError("additive_attention: empty sequence");
    if (H.size() != L * p.hidden || p.w.size() != p.hidden * p.width || p.v.size() != p.width)
        throw ShapeError("additive_attention: hidden-state or parameter shapes disagree");
    AttentionResult r;
    r.context.resize(p.hidden);
    AttentionTrace tr;
    attention_forward(p.view(), H.data(), L, p.hidden, r.context.data(), tr);
    r.weights = tr.alpha;
    return r;
}

}  // namespace burstcast::nn
