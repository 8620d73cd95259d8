#include <doctest.h>

#include <cmath>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/lstm.hpp"
#include "oracles.hpp"

using namespace burstcast;
using namespace burstcast::nn;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n, double s = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-s, s);
    return v;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("zero cell gives zero state") {
    LstmLayerParams p(3, 4);
    auto s = lstm_cell_forward(std::vector<double>(3, 0.0), std::vector<double>(4, 0.0), std::vector<double>(4, 0.0), p);
    for (double v : s.h) CHECK(v == 0.0);
    for (double v : s.c) CHECK(v == 0.0);
}

TEST_CASE("saturated forget and input gates carry the cell state through") {
    LstmLayerParams p = LstmLayerParams::random(2, 3, 4);
    for (std::size_t u = 0; u < 3; ++u) {
        p.b[u] = -800.0;     // input gate closed
        p.b[3 + u] = 800.0;  // forget gate open
    }
    const std::vector<double> c_prev{0.3, -1.2, 2.5};
    auto s = lstm_cell_forward(std::vector<double>{0.1, -0.2}, std::vector<double>{0.5, 0.1, -0.3}, c_prev, p);
    for (std::size_t u = 0; u < 3; ++u) CHECK(s.c[u] == doctest::Approx(c_prev[u]).epsilon(1e-12));
}

TEST_CASE("cell forward matches the scalar-loop reference") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t in = 1 + rng.below(6), d = 1 + rng.below(6);
        auto p = LstmLayerParams::random(in, d, 100 + static_cast<std::uint64_t>(trial));
        auto x = random_vec(rng, in, 2), h = random_vec(rng, d), c = random_vec(rng, d, 2);
        auto got = lstm_cell_forward(x, h, c, p);
        std::vector<double> eh, ec;
        oracle::to_scalar(p).step(x, h, c, eh, ec);
        REQUIRE(max_abs_diff(got.h, eh) < 1e-12);
        REQUIRE(max_abs_diff(got.c, ec) < 1e-12);
    }
}

TEST_CASE("sequence forward equals stepping the scalar cell") {
    Rng rng(3);
    const std::size_t in = 3, d = 4, L = 7;
    auto p = LstmLayerParams::random(in, d, 5);
    auto x = random_vec(rng, L * in);
    std::vector<double> h(L * d);
    LstmTrace tr;
    lstm_sequence_forward(p.view(), x.data(), in, L, false, h.data(), d, tr);
    auto cell = oracle::to_scalar(p);
    std::vector<double> hp(d, 0.0), cp(d, 0.0), hn, cn;
    for (std::size_t t = 0; t < L; ++t) {
        cell.step(std::vector<double>(x.begin() + t * in, x.begin() + (t + 1) * in), hp, cp, hn, cn);
        for (std::size_t k = 0; k < d; ++k) REQUIRE(h[t * d + k] == doctest::Approx(hn[k]).epsilon(1e-12));
        hp = hn;
        cp = cn;
    }
}

TEST_CASE("bidirectional layer output width and symmetry") {
    Rng rng(8);
    const std::size_t F = 3, d = 32, L = 6;
    auto fwd = LstmLayerParams::random(F, d, 1, 0.2);
    auto out = bilstm_layer_forward(random_vec(rng, L * F), L, fwd, LstmLayerParams::random(F, d, 2, 0.2));
    CHECK(out.size() == L * 64);

    // Same weights both ways on a reversed sequence: halves swap in time.
    const std::size_t d2 = 4;
    auto p = LstmLayerParams::random(F, d2, 3);
    auto seq = random_vec(rng, L * F);
    std::vector<double> rev(L * F);
    for (std::size_t t = 0; t < L; ++t)
        std::copy(seq.begin() + t * F, seq.begin() + (t + 1) * F, rev.begin() + (L - 1 - t) * F);
    auto a = bilstm_layer_forward(seq, L, p, p);
    auto b = bilstm_layer_forward(rev, L, p, p);
    for (std::size_t t = 0; t < L; ++t)
        for (std::size_t k = 0; k < d2; ++k) {
            CHECK(b[(L - 1 - t) * 2 * d2 + d2 + k] == doctest::Approx(a[t * 2 * d2 + k]).epsilon(1e-14));
            CHECK(b[(L - 1 - t) * 2 * d2 + k] == doctest::Approx(a[t * 2 * d2 + d2 + k]).epsilon(1e-14));
        }
}

TEST_CASE("single-step bidirectional output is two cell outputs") {
    auto f = LstmLayerParams::random(2, 3, 10), b = LstmLayerParams::random(2, 3, 11);
    const std::vector<double> x{0.4, -0.7}, z(3, 0.0);
    auto out = bilstm_layer_forward(x, 1, f, b);
    auto hf = lstm_cell_forward(x, z, z, f).h, hb = lstm_cell_forward(x, z, z, b).h;
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(out[k] == doctest::Approx(hf[k]).epsilon(1e-14));
        CHECK(out[3 + k] == doctest::Approx(hb[k]).epsilon(1e-14));
    }
}

TEST_CASE("shape mismatches throw") {
    LstmLayerParams p(3, 2);
    CHECK_THROWS_AS(lstm_cell_forward(std::vector<double>(2), std::vector<double>(2), std::vector<double>(2), p),
                    ShapeError);
    CHECK_THROWS_AS(bilstm_layer_forward(std::vector<double>(5), 2, p, p), ShapeError);
    CHECK_THROWS_AS(bilstm_layer_forward(std::vector<double>(6), 2, p, LstmLayerParams(3, 3)), ShapeError);
}
