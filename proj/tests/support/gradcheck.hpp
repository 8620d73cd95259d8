// Central finite-difference check of the analytic network gradient.
#pragma once

#include <algorithm>
#include <cmath>

#include "burstcast/core/rng.hpp"
#include "burstcast/nn/network.hpp"
#include "burstcast/nn/params.hpp"

namespace oracle {

struct GradCheck {
    double max_rel_error = 0.0;
    std::size_t parameters = 0;
};

/// Random tiny spec: 1-2 layers of width <= 4, lookback <= 5, input width <= 3.
inline burstcast::nn::ModelSpec tiny_spec(burstcast::nn::Variant v, std::uint64_t seed) {
    burstcast::Rng rng(burstcast::derive_seed(seed, {0x7370}));
    burstcast::nn::ModelSpec s;
    s.variant = v;
    s.lookback = 1 + rng.below(5);
    s.input_width = 1 + rng.below(3);
    s.lstm_widths.assign(1 + rng.below(2), 0);
    for (auto& w : s.lstm_widths) w = 1 + rng.below(4);
    s.attention_width = 1 + rng.below(4);
    s.dense_width = 1 + rng.below(4);
    s.dropout = rng.below(2) ? 0.25 : 0.0;
    return s;
}

/// Relative error |a - n| / max(|a|, |n|, floor) over every parameter, where
/// the loss is MSE over a random batch in training mode (fixed dropout masks).
inline GradCheck check_gradient(const burstcast::nn::ModelSpec& spec, std::uint64_t seed, double eps = 1e-5,
                                double floor = 1e-6) {
    using namespace burstcast;
    auto params = nn::init_params(spec, seed);
    Rng rng(derive_seed(seed, {0x6461}));
    // Larger weights than the default init so every path carries signal.
    for (auto& v : params.values) v += rng.uniform(-0.5, 0.5);
    const std::size_t B = 3;
    std::vector<double> x(B * spec.lookback * spec.input_width), y(B);
    for (auto& v : x) v = rng.uniform(-1.5, 1.5);
    for (auto& v : y) v = rng.uniform(-1, 1);
    const auto mode = spec.dropout > 0 ? nn::Mode::train : nn::Mode::eval;
    const std::uint64_t dseed = derive_seed(seed, {0x6d});

    auto loss = [&](const nn::ModelParams& p) {
        const auto pred = nn::forward_batch(p, x, B, mode, dseed);
        return nn::mse_loss(pred, y);
    };
    const auto grad = nn::backward_batch(params, x, y, mode, dseed);
    GradCheck out;
    out.parameters = params.values.size();
    for (std::size_t i = 0; i < params.values.size(); ++i) {
        auto p = params;
        const double w = p.values[i];
        p.values[i] = w + eps;
        const double up = loss(p);
        p.values[i] = w - eps;
        const double down = loss(p);
        const double numeric = (up - down) / (2 * eps);
        const double analytic = grad.values[i];
        const double rel =
            std::fabs(analytic - numeric) / std::max({std::fabs(analytic), std::fabs(numeric), floor});
        out.max_rel_error = std::max(out.max_rel_error, rel);
    }
    return out;
}

}  // namespace oracle
