#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace burstcast::nn::kernels {

/// y += a * x
inline void axpy(double a, const double* __restrict x, double* __restrict y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

/// Dot product with eight fixed partial sums. The summation order is part of
/// the function, so serial and threaded callers get identical bits.
inline double dot(const double* __restrict x, const double* __restrict y, std::size_t n) {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        for (std::size_t k = 0; k < 8; ++k) acc[k] += x[i + k] * y[i + k];
    double tail = 0.0;
    for (; i < n; ++i) tail += x[i] * y[i];
    return ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + tail;
}

/// exp(x) within about 1 ulp on [-708, 709], clamped outside. Branch-free so
/// loops over gate blocks vectorize; the libm call would not.
inline double exp(double x) {
    x = std::min(std::max(x, -708.0), 709.0);
    constexpr double shifter = 0x1.8p52;
    const double kd = (x * 1.4426950408889634 + shifter) - shifter;
    const double r = (x - kd * 0x1.62e42fefa3800p-1) - kd * 0x1.ef35793c76730p-45;
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;
    const auto k = static_cast<std::int64_t>(kd);
    return p * std::bit_cast<double>(static_cast<std::uint64_t>(k + 1023) << 52);
}

inline double sigmoid(double z) { return 1.0 / (1.0 + exp(-z)); }

/// Absolute error below 1e-16; relative accuracy degrades only for |x| < 1e-8.
inline double tanh(double x) {
    const double e = exp(-2.0 * std::fabs(x));
    return std::copysign((1.0 - e) / (1.0 + e), x);
}

}  // namespace burstcast::nn::kernels
