#pragma once

#include <cstddef>
#include <span>

namespace burstcast::baselines {

inline constexpr std::size_t kSeasonalPeriod = 52;
inline constexpr std::size_t kMovingAverageWindow = 4;

/// y[t - s]. Throws DataError when t < s.
double seasonal_naive_forecast(std::span<const double> series, std::size_t t, std::size_t s = kSeasonalPeriod);

/// mean(y[t-k .. t-1]). Throws DataError when t < k, std::invalid_argument when k == 0.
double moving_average_forecast(std::span<const double> series, std::size_t t, std::size_t k = kMovingAverageWindow);

}  // namespace burstcast::baselines
