#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "burstcast/baselines/sarima.hpp"
#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"

using namespace burstcast;
using namespace burstcast::baselines;

namespace {

double normal(Rng& rng) {
    return std::sqrt(-2 * std::log(rng.uniform_open())) * std::cos(6.283185307179586 * rng.uniform());
}

std::vector<double> arma11(double phi, double theta, std::size_t n, std::uint64_t seed, double mu = 0.0) {
    Rng rng(seed);
    std::vector<double> y(n);
    double prev_y = 0, prev_e = 0;
    for (std::size_t t = 0; t < n + 200; ++t) {
        const double e = normal(rng);
        const double v = phi * prev_y + e + theta * prev_e;
        prev_y = v;
        prev_e = e;
        if (t >= 200) y[t - 200] = v + mu;
    }
    return y;
}

SarimaOrder order(int p, int q, int P = 0, int Q = 0, std::size_t s = 52) {
    SarimaOrder o;
    o.p = p;
    o.q = q;
    o.P = P;
    o.Q = Q;
    o.s = s;
    return o;
}

}  // namespace

TEST_CASE("polynomial expansion multiplies seasonal factors") {
    auto p = SarimaParams::zeros(order(1, 1, 1, 1, 4));
    p.phi = {0.5};
    p.Phi = {0.2};
    p.theta = {0.3};
    p.Theta = {0.4};
    const auto lp = expand_polynomials(p);
    REQUIRE(lp.ar.size() == 5);
    CHECK(lp.ar[0] == 0.5);
    CHECK(lp.ar[3] == 0.2);
    CHECK(lp.ar[4] == doctest::Approx(-0.1));
    REQUIRE(lp.ma.size() == 5);
    CHECK(lp.ma[0] == 0.3);
    CHECK(lp.ma[3] == 0.4);
    CHECK(lp.ma[4] == doctest::Approx(0.12));
}

TEST_CASE("CSS of the zero model around the mean is the sum of squares") {
    Rng rng(1);
    std::vector<double> y(300);
    for (auto& v : y) v = rng.uniform(0, 10);
    auto p = SarimaParams::zeros(order(1, 1, 1, 1));
    double mean = 0;
    for (double v : y) mean += v;
    mean /= 300;
    p.mu = mean;
    const std::size_t start = default_burn_in(p.order);
    CHECK(start == 53);
    double ss = 0;
    for (std::size_t t = start; t < y.size(); ++t) ss += (y[t] - mean) * (y[t] - mean);
    CHECK(sarima_css_loss(y, p) == doctest::Approx(ss).epsilon(1e-12));
    CHECK_THROWS_AS(sarima_css_loss(std::vector<double>(40, 1.0), p), DataError);
}

TEST_CASE("hand recursion for ARMA(1,1) forecasts") {
    auto p = SarimaParams::zeros(order(1, 1));
    p.phi = {0.5};
    p.theta = {0.2};
    const std::vector<double> y_hist{4.0}, e_hist{1.0};
    CHECK(sarima_predict_next(p, y_hist, e_hist) == doctest::Approx(2.2).epsilon(1e-15));
    auto z = SarimaParams::zeros(order(1, 1, 1, 1));
    z.mu = 3.25;
    CHECK(sarima_forecast(z, std::vector<double>(60, 1.0)).front() == 3.25);
    auto rw = SarimaParams::zeros(order(1, 0));
    rw.phi = {1 - 1e-9};
    std::vector<double> hist(60, 1.0);
    hist.back() = 7.5;
    CHECK(sarima_forecast(rw, hist).front() == doctest::Approx(7.5).epsilon(1e-8));
    CHECK_THROWS_AS(sarima_forecast(rw, std::vector<double>{1, 2, 7.5}), DataError);
}

TEST_CASE("one-step predictions equal predict_next on the running residuals") {
    auto p = SarimaParams::zeros(order(1, 1, 1, 0, 4));
    p.phi = {0.4};
    p.theta = {-0.3};
    p.Phi = {0.25};
    p.mu = 1.0;
    const auto y = arma11(0.4, -0.3, 60, 3, 1.0);
    const auto pred = sarima_one_step(p, y, 5);
    const auto eps = sarima_residuals(y, p, 5);
    for (std::size_t t = 5; t < y.size(); ++t) {
        const double direct = sarima_predict_next(p, std::span(y).first(t), std::span(eps).first(t));
        REQUIRE(pred[t] == doctest::Approx(direct).epsilon(1e-12));
        REQUIRE(eps[t] == doctest::Approx(y[t] - pred[t]).epsilon(1e-12));
    }
}

TEST_CASE("CSS fit recovers ARMA(1,1) coefficients and is deterministic") {
    const auto y = arma11(0.6, 0.3, 2000, 7, 2.0);
    const auto a = sarima_fit(y, order(1, 1));
    const auto b = sarima_fit(y, order(1, 1));
    CHECK(std::fabs(a.phi[0] - 0.6) < 0.1);
    CHECK(std::fabs(a.theta[0] - 0.3) < 0.1);
    CHECK(std::fabs(a.mu - 2.0) < 0.3);
    CHECK(a.phi == b.phi);
    CHECK(a.theta == b.theta);
    CHECK(a.css == b.css);
    CHECK(a.aic == doctest::Approx(static_cast<double>(a.n_eff) * std::log(a.css / static_cast<double>(a.n_eff)) +
                                   2.0 * (2 + 2)));
}

TEST_CASE("white noise gives small ARMA coefficients") {
    const auto y = arma11(0.0, 0.0, 2000, 8);
    const auto f = sarima_fit(y, order(1, 1));
    CHECK(std::fabs(f.phi[0]) < 0.1 + std::fabs(f.theta[0]));
    CHECK(std::fabs(f.phi[0] + f.theta[0]) < 0.1);
}

TEST_CASE("order search") {
    const auto ar = arma11(0.8, 0.0, 1500, 9);
    std::vector<SarimaOrder> grid;
    for (int p = 0; p <= 1; ++p)
        for (int q = 0; q <= 1; ++q) grid.push_back(order(p, q, 0, 0, 12));
    const auto r = sarima_order_search(ar, grid);
    CHECK(r.best.order.p == 1);
    CHECK(r.fits.size() == 4);
    const auto one = sarima_order_search(ar, {order(0, 1, 0, 0, 12)});
    CHECK(one.best.order == order(0, 1, 0, 0, 12));
    CHECK(default_grid().size() == 16);
}

TEST_CASE("panel fits are identical serially and in parallel") {
    std::vector<std::vector<double>> series{arma11(0.5, 0.2, 200, 1), arma11(-0.3, 0.0, 200, 2), std::vector<double>(3)};
    std::vector<SarimaOrder> grid{order(0, 0, 0, 0, 4), order(1, 0, 0, 0, 4), order(1, 1, 1, 0, 4)};
    const auto a = fit_sarima_panel(series, grid, Exec::serial);
    const auto b = fit_sarima_panel(series, grid, Exec::parallel);
    REQUIRE(a.fits[0]);
    CHECK(a.fits[0]->best.phi == b.fits[0]->best.phi);
    CHECK(a.fits[1]->best.aic == b.fits[1]->best.aic);
    CHECK_FALSE(a.fits[2]);
    CHECK_FALSE(a.errors[2].empty());
}
