#pragma once

#include <span>
#include <vector>

#include "burstcast/core/matrix.hpp"
#include "burstcast/dataset.hpp"

namespace burstcast::baselines {

inline constexpr double kDefaultRidge = 1e-8;

struct LinearModel {
    std::vector<double> coefficients;  // one per design column
    double intercept = 0.0;
    double lambda = 0.0;

    double predict(std::span<const double> row) const;
};

/// Minimizes |y - X b - c|^2 + lambda |b|^2 (intercept c unpenalized) by a
/// rank-revealing QR of the augmented system. lambda = 0 with a
/// rank-deficient design throws DataError.
LinearModel linear_fit(const Matrix& X, std::span<const double> y, double lambda = kDefaultRidge);

/// Single-row regression on the engineered features: scaled row t predicts the
/// raw count at t+1. Fitted on training rows whose target week is also in train.
LinearModel fit_linear_baseline(const FeatureMatrix& features, const Scaler& scaler, const SplitIndex& split,
                                double lambda = kDefaultRidge);

/// Prediction for feature row `row` of geography `geo`.
double predict_linear_baseline(const LinearModel& model, const FeatureMatrix& features, const Scaler& scaler,
                               std::size_t geo, std::size_t row);

}  // namespace burstcast::baselines
