#pragma once

#include <cstddef>
#include <iosfwd>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

namespace burstcast {

struct GeoMetrics {
    long geo_id = 0;
    std::size_t n = 0;
    double rmse = 0.0, mae = 0.0, mse = 0.0;
    /// NaN when the geography's actuals have zero variance.
    double r2 = 0.0;
    bool r2_defined = true;
};

struct MetricSummary {
    double rmse = 0.0, mae = 0.0, mse = 0.0, r2 = 0.0;
};

struct MetricReport {
    std::vector<GeoMetrics> per_geo;  // ascending geo id
    /// Unweighted means over geographies; macro R² skips undefined groups.
    MetricSummary macro;
    /// All observations pooled; R² against the pooled test mean.
    MetricSummary pooled;
    std::size_t r2_excluded = 0;
    std::size_t n_observations = 0;
};

/// R² per geography uses that geography's own mean of `actual`.
MetricReport compute_metrics(std::span<const double> pred, std::span<const double> actual,
                             std::span<const long> geo);

double macro_average(std::span<const double> values);

/// 100 (1 - candidate / reference); reference must be positive.
double improvement_pct(double candidate_rmse, double reference_rmse);

struct SignificanceResult {
    double t_statistic = 0.0;
    std::size_t degrees_of_freedom = 0;
    double p_value = 1.0;  // two-sided
    double cohens_d = 0.0;
    /// Zero spread with a nonzero mean difference: p = 0, d = ±inf.
    bool degenerate = false;
};

/// Paired test on a - b.
SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// I_x(a, b) by Lentz's continued fraction.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
/// P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

/// Rows (model, geo, n, rmse, mae, mse, r2); geo is the id, "macro" or "pooled".
void write_metrics_csv(std::ostream& out, const std::string& model, const MetricReport& report, bool header = true);
nlohmann::json metrics_to_json(const MetricReport& report);
nlohmann::json significance_to_json(const SignificanceResult& result);

}  // namespace burstcast
