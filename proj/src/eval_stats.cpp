#include "burstcast/eval_stats.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"

namespace burstcast {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Acc {
    std::size_t n = 0;
    double sse = 0.0, sae = 0.0, sum = 0.0, sumsq = 0.0;
    std::vector<double> actual;
};

double r2_of(const std::vector<double>& actual, double sse, bool& defined) {
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double sst = 0.0;
    for (double a : actual) sst += (a - mean) * (a - mean);
    defined = sst > 0.0 && actual.size() >= 2;
    return defined ? 1.0 - sse / sst : kNaN;
}

}  // namespace

MetricReport compute_metrics(std::span<const double> pred, std::span<const double> actual, std::span<const long> geo) {
    if (pred.size() != actual.size() || pred.size() != geo.size())
        throw ShapeError("compute_metrics: prediction, actual and geography vectors differ in length");
    if (pred.empty()) throw DataError("compute_metrics: no observations");

    std::map<long, Acc> groups;
    Acc all;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double r = actual[i] - pred[i];
        for (Acc* a : {&groups[geo[i]], &all}) {
            ++a->n;
            a->sse += r * r;
            a->sae += std::abs(r);
            a->actual.push_back(actual[i]);
        }
    }

    MetricReport rep;
    rep.n_observations = all.n;
    std::vector<double> rmse, mae, mse, r2;
    for (const auto& [id, a] : groups) {
        GeoMetrics m;
        m.geo_id = id;
        m.n = a.n;
        m.mse = a.sse / static_cast<double>(a.n);
        m.rmse = std::sqrt(m.mse);
        m.mae = a.sae / static_cast<double>(a.n);
        m.r2 = r2_of(a.actual, a.sse, m.r2_defined);
        rep.per_geo.push_back(m);
        rmse.push_back(m.rmse);
        mae.push_back(m.mae);
        mse.push_back(m.mse);
        if (m.r2_defined)
            r2.push_back(m.r2);
        else
            ++rep.r2_excluded;
    }
    rep.macro.rmse = macro_average(rmse);
    rep.macro.mae = macro_average(mae);
    rep.macro.mse = macro_average(mse);
    rep.macro.r2 = r2.empty() ? kNaN : macro_average(r2);

    rep.pooled.mse = all.sse / static_cast<double>(all.n);
    rep.pooled.rmse = std::sqrt(rep.pooled.mse);
    rep.pooled.mae = all.sae / static_cast<double>(all.n);
    bool defined = false;
    rep.pooled.r2 = r2_of(all.actual, all.sse, defined);
    return rep;
}

double macro_average(std::span<const double> v) {
    if (v.empty()) throw DataError("macro_average: no values");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double improvement_pct(double candidate, double reference) {
    if (!(reference > 0.0)) throw std::invalid_argument("improvement_pct: reference RMSE must be positive");
    return 100.0 * (1.0 - candidate / reference);
}

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("incomplete beta: shape parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                             b * std::log1p(-x);
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if (x > (a + 1.0) / (a + b + 2.0)) return 1.0 - regularized_incomplete_beta(b, a, 1.0 - x);

    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    double f = 1.0, c = 1.0, d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    f = d;
    for (int m = 1; m <= 500; ++m) {
        const double md = m;
        // even step
        double num = md * (b - md) * x / ((a + 2.0 * md - 1.0) * (a + 2.0 * md));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        f *= c * d;
        // odd step
        num = -(a + md) * (a + b + md) * x / ((a + 2.0 * md) * (a + 2.0 * md + 1.0));
        d = 1.0 + num * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + num / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < eps) break;
    }
    return std::exp(log_front) * f / a;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student t: degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
    const double tail = 0.5 * student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - tail : tail;
}

SignificanceResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("paired_t_test: samples differ in length");
    const std::size_t n = a.size();
    if (n < 2) throw DataError("paired_t_test: needs at least 2 pairs");
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i] - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));

    SignificanceResult r;
    r.degrees_of_freedom = n - 1;
    if (sd == 0.0) {
        if (mean == 0.0) return r;
        r.degenerate = true;
        r.p_value = 0.0;
        r.t_statistic = std::copysign(std::numeric_limits<double>::infinity(), mean);
        r.cohens_d = r.t_statistic;
        return r;
    }
    r.t_statistic = mean / (sd / std::sqrt(static_cast<double>(n)));
    r.p_value = student_t_two_sided_p(r.t_statistic, static_cast<double>(n - 1));
    r.cohens_d = mean / sd;
    return r;
}

namespace {

std::string num(double v) { return std::isfinite(v) ? csv::format_double(v) : std::string("NA"); }

nlohmann::json jnum(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json summary_json(const MetricSummary& s) {
    return {{"rmse", jnum(s.rmse)}, {"mae", jnum(s.mae)}, {"mse", jnum(s.mse)}, {"r2", jnum(s.r2)}};
}

}  // namespace

void write_metrics_csv(std::ostream& out, const std::string& model, const MetricReport& rep, bool header) {
    if (header) out << "model,geo,n,rmse,mae,mse,r2\n";
    const auto m = csv::escape(model);
    for (const auto& g : rep.per_geo)
        out << m << ',' << g.geo_id << ',' << g.n << ',' << num(g.rmse) << ',' << num(g.mae) << ',' << num(g.mse)
            << ',' << num(g.r2) << '\n';
    out << m << ",macro," << rep.per_geo.size() << ',' << num(rep.macro.rmse) << ',' << num(rep.macro.mae) << ','
        << num(rep.macro.mse) << ',' << num(rep.macro.r2) << '\n';
    out << m << ",pooled," << rep.n_observations << ',' << num(rep.pooled.rmse) << ',' << num(rep.pooled.mae) << ','
        << num(rep.pooled.mse) << ',' << num(rep.pooled.r2) << '\n';
}

nlohmann::json metrics_to_json(const MetricReport& rep) {
    nlohmann::json per = nlohmann::json::array();
    for (const auto& g : rep.per_geo)
        per.push_back({{"geo", g.geo_id},
                       {"n", g.n},
                       {"rmse", jnum(g.rmse)},
                       {"mae", jnum(g.mae)},
                       {"mse", jnum(g.mse)},
                       {"r2", jnum(g.r2)}});
    return {{"macro", summary_json(rep.macro)},
            {"pooled", summary_json(rep.pooled)},
            {"r2_excluded_geographies", rep.r2_excluded},
            {"n_observations", rep.n_observations},
            {"per_geography", per}};
}

nlohmann::json significance_to_json(const SignificanceResult& r) {
    return {{"t", jnum(r.t_statistic)},
            {"df", r.degrees_of_freedom},
            {"p_value", r.p_value},
            {"cohens_d", jnum(r.cohens_d)},
            {"degenerate", r.degenerate}};
}

}  // namespace burstcast
