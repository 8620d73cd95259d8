#pragma once

#include <cstddef>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstcast/baselines/nelder_mead.hpp"
#include "burstcast/core/exec.hpp"

namespace burstcast::baselines {

/// (p, d, q)(P, D, Q)_s. Only d = D = 0 is supported.
struct SarimaOrder {
    int p = 1, d = 0, q = 1;
    int P = 1, D = 0, Q = 1;
    std::size_t s = 52;

    int n_coefficients() const { return p + q + P + Q; }
    std::string label() const;
    void validate() const;
    bool operator==(const SarimaOrder&) const = default;
};

struct SarimaParams {
    SarimaOrder order;
    std::vector<double> phi, theta, Phi, Theta;
    double mu = 0.0;
    double sigma2 = 0.0;
    double css = 0.0;
    std::size_t n_eff = 0;
    double aic = 0.0;
    bool converged = true;
    std::size_t iterations = 0;

    /// All coefficients zero, mu = 0.
    static SarimaParams zeros(const SarimaOrder& order);
};

/// Lag coefficients of the multiplied operators:
///   y_t - mu = sum_k ar[k-1] (y_{t-k} - mu) + eps_t + sum_k ma[k-1] eps_{t-k}
struct LagPolynomials {
    std::vector<double> ar;
    std::vector<double> ma;
};
LagPolynomials expand_polynomials(const SarimaParams& params);

/// First index whose residual enters the CSS. The default, shared by every
/// order of a grid so their AIC values cover the same observations, is
/// max(s + 1, p + s P).
std::size_t default_burn_in(const SarimaOrder& order);

/// Recursive one-step residuals; entries before `start` are 0.
std::vector<double> sarima_residuals(std::span<const double> y, const SarimaParams& params, std::size_t start);

/// Sum of squared residuals from `burn_in` on. burn_in 0 means default_burn_in.
double sarima_css_loss(std::span<const double> y, const SarimaParams& params, std::size_t burn_in = 0);

/// Prediction of y[t] for t = y_hist.size() from explicit observation and
/// residual histories of equal length.
double sarima_predict_next(const SarimaParams& params, std::span<const double> y_hist,
                           std::span<const double> eps_hist);

/// Filters `history` for residuals, then forecasts `horizon` steps with future
/// residuals set to 0.
std::vector<double> sarima_forecast(const SarimaParams& params, std::span<const double> history,
                                    std::size_t horizon = 1);

/// ŷ_t for every t of y using observations up to t-1 and fixed parameters;
/// residuals are accumulated from `start` on.
std::vector<double> sarima_one_step(const SarimaParams& params, std::span<const double> y, std::size_t start);

/// CSS by Nelder–Mead over tanh-transformed coefficients and a free mean.
/// Non-convergence keeps the best point and clears `converged`.
SarimaParams sarima_fit(std::span<const double> y, const SarimaOrder& order, std::size_t burn_in = 0,
                        const NelderMeadOptions& options = {});

/// p, q, P, Q in {0, 1}, d = D = 0.
std::vector<SarimaOrder> default_grid(std::size_t s = 52);

struct OrderSearchResult {
    SarimaParams best;
    std::vector<SarimaParams> fits;
    std::vector<std::pair<SarimaOrder, std::string>> failures;
};

/// Minimum AIC; near-ties (relative 1e-12) go to fewer coefficients, then to
/// lexicographic (p, q, P, Q). Throws DataError when every fit fails.
OrderSearchResult sarima_order_search(std::span<const double> y, const std::vector<SarimaOrder>& grid,
                                      std::size_t burn_in = 0);

/// One independent order search per series. Failed series carry an error.
struct PanelSarima {
    std::vector<std::optional<OrderSearchResult>> fits;
    std::vector<std::string> errors;
};
PanelSarima fit_sarima_panel(const std::vector<std::vector<double>>& series, const std::vector<SarimaOrder>& grid,
                             Exec exec);

nlohmann::json to_json(const SarimaOrder& order);
nlohmann::json to_json(const SarimaParams& params);
nlohmann::json to_json(const OrderSearchResult& result);

}  // namespace burstcast::baselines
