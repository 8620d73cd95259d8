#include "burstcast/baselines/naive.hpp"

#include <stdexcept>
#include <string>

#include "burstcast/core/error.hpp"

namespace burstcast::baselines {

double seasonal_naive_forecast(std::span<const double> y, std::size_t t, std::size_t s) {
    if (s == 0) throw std::invalid_argument("seasonal period must be positive");
    if (t < s || t - s >= y.size())
        throw DataError("seasonal naive: insufficient history at t=" + std::to_string(t) + " (needs t >= " +
                        std::to_string(s) + ")");
    return y[t - s];
}

double moving_average_forecast(std::span<const double> y, std::size_t t, std::size_t k) {
    if (k == 0) throw std::invalid_argument("moving average window must be positive");
    if (t < k || t > y.size())
        throw DataError("moving average: insufficient history at t=" + std::to_string(t) + " (needs t >= " +
                        std::to_string(k) + ")");
    double s = 0.0;
    for (std::size_t i = t - k; i < t; ++i) s += y[i];
    return s / static_cast<double>(k);
}

}  // namespace burstcast::baselines
