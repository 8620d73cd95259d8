#include "burstcast/baselines/sarima.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "burstcast/core/error.hpp"

namespace burstcast::baselines {

std::string SarimaOrder::label() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")(" + std::to_string(P) +
           "," + std::to_string(D) + "," + std::to_string(Q) + ")_" + std::to_string(s);
}

void SarimaOrder::validate() const {
    if (p < 0 || q < 0 || P < 0 || Q < 0) throw std::invalid_argument("SARIMA orders must be nonnegative");
    if (d != 0 || D != 0) throw std::invalid_argument("SARIMA differencing is not supported (d = D = 0)");
    if (s < 2) throw std::invalid_argument("SARIMA seasonal period must be >= 2");
}

SarimaParams SarimaParams::zeros(const SarimaOrder& o) {
    SarimaParams p;
    p.order = o;
    p.phi.assign(static_cast<std::size_t>(o.p), 0.0);
    p.theta.assign(static_cast<std::size_t>(o.q), 0.0);
    p.Phi.assign(static_cast<std::size_t>(o.P), 0.0);
    p.Theta.assign(static_cast<std::size_t>(o.Q), 0.0);
    return p;
}

namespace {

// (sign_a · 1 + Σ a_i B^i)(1 + Σ b_j B^{js}) with sign conventions applied by the caller.
std::vector<double> multiply(const std::vector<double>& short_lags, const std::vector<double>& seasonal, std::size_t s) {
    const std::size_t len = short_lags.size() + seasonal.size() * s;
    std::vector<double> c(len + 1, 0.0);  // c[0] = 1
    c[0] = 1.0;
    for (std::size_t i = 0; i < short_lags.size(); ++i) c[i + 1] += short_lags[i];
    for (std::size_t j = 0; j < seasonal.size(); ++j) {
        const std::size_t sj = (j + 1) * s;
        c[sj] += seasonal[j];
        for (std::size_t i = 0; i < short_lags.size(); ++i) c[sj + i + 1] += seasonal[j] * short_lags[i];
    }
    return {c.begin() + 1, c.end()};
}

struct SparseLags {
    std::vector<std::pair<std::size_t, double>> ar, ma;
};

SparseLags sparse(const SarimaParams& p) {
    const auto poly = expand_polynomials(p);
    SparseLags out;
    for (std::size_t k = 0; k < poly.ar.size(); ++k)
        if (poly.ar[k] != 0.0) out.ar.emplace_back(k + 1, poly.ar[k]);
    for (std::size_t k = 0; k < poly.ma.size(); ++k)
        if (poly.ma[k] != 0.0) out.ma.emplace_back(k + 1, poly.ma[k]);
    return out;
}

inline double predict_at(const SparseLags& lags, double mu, const double* y, const double* eps, std::size_t t) {
    double v = mu;
    for (const auto& [k, a] : lags.ar)
        if (k <= t) v += a * (y[t - k] - mu);
    for (const auto& [k, b] : lags.ma)
        if (k <= t) v += b * eps[t - k];
    return v;
}

std::size_t resolve_burn_in(const SarimaOrder& o, std::size_t burn_in) {
    return burn_in == 0 ? default_burn_in(o) : burn_in;
}

void check_length(std::span<const double> y, const SarimaOrder& o, std::size_t start) {
    const auto need = start + static_cast<std::size_t>(o.n_coefficients()) + 2;
    if (y.size() < need)
        throw DataError("SARIMA " + o.label() + ": series of length " + std::to_string(y.size()) +
                        " is too short; needs at least " + std::to_string(need));
}

}  // namespace

LagPolynomials expand_polynomials(const SarimaParams& p) {
    // AR operator (1 - Σφ B^i)(1 - ΣΦ B^{js}) moved to the right-hand side:
    // y_t - mu = -Σ_k c_k (y_{t-k} - mu) where c are the operator's lag terms.
    std::vector<double> neg_phi(p.phi.size()), neg_Phi(p.Phi.size());
    for (std::size_t i = 0; i < p.phi.size(); ++i) neg_phi[i] = -p.phi[i];
    for (std::size_t i = 0; i < p.Phi.size(); ++i) neg_Phi[i] = -p.Phi[i];
    auto ar = multiply(neg_phi, neg_Phi, p.order.s);
    for (double& a : ar) a = -a;
    return {std::move(ar), multiply(p.theta, p.Theta, p.order.s)};
}

std::size_t default_burn_in(const SarimaOrder& o) {
    return std::max(o.s + 1, static_cast<std::size_t>(o.p) + o.s * static_cast<std::size_t>(o.P));
}

std::vector<double> sarima_residuals(std::span<const double> y, const SarimaParams& p, std::size_t start) {
    const auto lags = sparse(p);
    std::vector<double> eps(y.size(), 0.0);
    for (std::size_t t = start; t < y.size(); ++t) eps[t] = y[t] - predict_at(lags, p.mu, y.data(), eps.data(), t);
    return eps;
}

double sarima_css_loss(std::span<const double> y, const SarimaParams& p, std::size_t burn_in) {
    p.order.validate();
    const std::size_t start = resolve_burn_in(p.order, burn_in);
    check_length(y, p.order, start);
    const auto eps = sarima_residuals(y, p, start);
    double s = 0.0;
    for (std::size_t t = start; t < y.size(); ++t) s += eps[t] * eps[t];
    return s;
}

double sarima_predict_next(const SarimaParams& p, std::span<const double> y, std::span<const double> eps) {
    if (y.size() != eps.size()) throw ShapeError("sarima_predict_next: history lengths differ");
    const auto lags = sparse(p);
    const std::size_t t = y.size();
    const std::size_t need = std::max(lags.ar.empty() ? 0 : lags.ar.back().first, lags.ma.empty() ? 0 : lags.ma.back().first);
    if (t < need) throw DataError("sarima_predict_next: history shorter than the largest lag");
    return predict_at(lags, p.mu, y.data(), eps.data(), t);
}

std::vector<double> sarima_forecast(const SarimaParams& p, std::span<const double> history, std::size_t horizon) {
    const std::size_t start = default_burn_in(p.order);
    if (history.size() < start) throw DataError("sarima_forecast: history does not cover the required lags");
    const auto lags = sparse(p);
    std::vector<double> y(history.begin(), history.end());
    std::vector<double> eps = sarima_residuals(history, p, start);
    std::vector<double> out;
    for (std::size_t h = 0; h < horizon; ++h) {
        const double v = predict_at(lags, p.mu, y.data(), eps.data(), y.size());
        out.push_back(v);
        y.push_back(v);
        eps.push_back(0.0);
    }
    return out;
}

std::vector<double> sarima_one_step(const SarimaParams& p, std::span<const double> y, std::size_t start) {
    const auto lags = sparse(p);
    std::vector<double> eps(y.size(), 0.0);
    std::vector<double> pred(y.size(), 0.0);
    for (std::size_t t = 0; t < y.size(); ++t) {
        pred[t] = predict_at(lags, p.mu, y.data(), eps.data(), t);
        if (t >= start) eps[t] = y[t] - pred[t];
    }
    return pred;
}

namespace {

SarimaParams unpack(const SarimaOrder& o, const std::vector<double>& x) {
    SarimaParams p = SarimaParams::zeros(o);
    std::size_t i = 0;
    for (double& v : p.phi) v = std::tanh(x[i++]);
    for (double& v : p.theta) v = std::tanh(x[i++]);
    for (double& v : p.Phi) v = std::tanh(x[i++]);
    for (double& v : p.Theta) v = std::tanh(x[i++]);
    p.mu = x[i];
    return p;
}

}  // namespace

SarimaParams sarima_fit(std::span<const double> y, const SarimaOrder& order, std::size_t burn_in,
                        const NelderMeadOptions& options) {
    order.validate();
    const std::size_t start = resolve_burn_in(order, burn_in);
    check_length(y, order, start);
    const std::size_t n_eff = y.size() - start;

    double mean = 0.0;
    for (std::size_t t = start; t < y.size(); ++t) mean += y[t];
    mean /= static_cast<double>(n_eff);
    double var = 0.0;
    for (std::size_t t = start; t < y.size(); ++t) var += (y[t] - mean) * (y[t] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n_eff));

    const std::size_t k = static_cast<std::size_t>(order.n_coefficients());
    std::vector<double> x0(k + 1, 0.0);
    x0[k] = mean;
    std::vector<double> steps(k + 1, 0.2);
    steps[k] = std::max(0.1 * sd, 1e-3);

    auto objective = [&](const std::vector<double>& x) { return sarima_css_loss(y, unpack(order, x), start); };
    auto r = nelder_mead(objective, x0, steps, options);
    // One restart from the best vertex guards against a collapsed simplex.
    auto r2 = nelder_mead(objective, r.x, steps, options);
    if (r2.value <= r.value) {
        r2.iterations += r.iterations;
        r = std::move(r2);
    }

    SarimaParams p = unpack(order, r.x);
    p.css = r.value;
    p.n_eff = n_eff;
    p.sigma2 = p.css / static_cast<double>(n_eff);
    const double n = static_cast<double>(n_eff);
    p.aic = n * std::log(std::max(p.css / n, 1e-300)) + 2.0 * static_cast<double>(k + 2);
    p.converged = r.converged;
    p.iterations = r.iterations;
    return p;
}

std::vector<SarimaOrder> default_grid(std::size_t s) {
    std::vector<SarimaOrder> g;
    for (int p = 0; p <= 1; ++p)
        for (int q = 0; q <= 1; ++q)
            for (int P = 0; P <= 1; ++P)
                for (int Q = 0; Q <= 1; ++Q) g.push_back(SarimaOrder{p, 0, q, P, 0, Q, s});
    return g;
}

OrderSearchResult sarima_order_search(std::span<const double> y, const std::vector<SarimaOrder>& grid,
                                      std::size_t burn_in) {
    if (grid.empty()) throw std::invalid_argument("sarima_order_search: empty grid");
    std::size_t start = burn_in;
    if (start == 0)
        for (const auto& o : grid) start = std::max(start, default_burn_in(o));

    OrderSearchResult res;
    for (const auto& o : grid) {
        try {
            res.fits.push_back(sarima_fit(y, o, start));
        } catch (const std::exception& e) {
            res.failures.emplace_back(o, e.what());
        }
    }
    if (res.fits.empty()) throw DataError("sarima_order_search: every order failed to fit");

    auto key = [](const SarimaOrder& o) { return std::make_tuple(o.n_coefficients(), o.p, o.q, o.P, o.Q); };
    const SarimaParams* best = &res.fits.front();
    for (const auto& f : res.fits) {
        const double tol = 1e-12 * std::max(1.0, std::abs(best->aic));
        if (f.aic < best->aic - tol || (std::abs(f.aic - best->aic) <= tol && key(f.order) < key(best->order)))
            best = &f;
    }
    res.best = *best;
    return res;
}

PanelSarima fit_sarima_panel(const std::vector<std::vector<double>>& series, const std::vector<SarimaOrder>& grid,
                             Exec exec) {
    const std::size_t G = series.size();
    PanelSarima out;
    out.fits.resize(G);
    out.errors.resize(G);
    auto one = [&](std::size_t g) {
        try {
            out.fits[g] = sarima_order_search(series[g], grid);
        } catch (const std::exception& e) {
            out.errors[g] = e.what();
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::size_t g = 0; g < G; ++g) one(g);
    } else {
        for (std::size_t g = 0; g < G; ++g) one(g);
    }
    return out;
}

nlohmann::json to_json(const SarimaOrder& o) {
    return {{"p", o.p}, {"d", o.d}, {"q", o.q}, {"P", o.P}, {"D", o.D}, {"Q", o.Q}, {"s", o.s}};
}

nlohmann::json to_json(const SarimaParams& p) {
    return {{"order", to_json(p.order)}, {"phi", p.phi},       {"theta", p.theta},         {"Phi", p.Phi},
            {"Theta", p.Theta},          {"mu", p.mu},         {"sigma2", p.sigma2},       {"css", p.css},
            {"n_eff", p.n_eff},          {"aic", p.aic},       {"converged", p.converged}, {"iterations", p.iterations}};
}

nlohmann::json to_json(const OrderSearchResult& r) {
    nlohmann::json table = nlohmann::json::array();
    for (const auto& f : r.fits) table.push_back({{"order", to_json(f.order)}, {"aic", f.aic}, {"css", f.css}});
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& [o, msg] : r.failures) failures.push_back({{"order", to_json(o)}, {"error", msg}});
    return {{"selected", to_json(r.best)}, {"aic_table", table}, {"failures", failures}};
}

}  // namespace burstcast::baselines
