#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace burstcast::nn {

struct AdamConfig {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    AdamState() = default;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
    bool operator==(const AdamState&) const = default;
};

/// One bias-corrected Adam update in place. Throws TrainingError if any
/// gradient entry is not finite; parameters and state are untouched then.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
               const AdamConfig& config = {});

}  // namespace burstcast::nn
