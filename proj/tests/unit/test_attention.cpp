#include <doctest.h>

#include <cmath>
#include <numeric>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/nn/attention.hpp"

using namespace burstcast;
using namespace burstcast::nn;

TEST_CASE("softmax closed form") {
    const auto a = softmax(std::vector<double>{0.0, std::log(2.0), std::log(4.0), std::log(8.0)});
    for (int i = 0; i < 4; ++i) CHECK(std::fabs(a[static_cast<std::size_t>(i)] - std::pow(2.0, i) / 15.0) < 1e-12);
}

TEST_CASE("softmax sums to one and survives huge scores") {
    Rng rng(1);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> s(1 + rng.below(40));
        for (auto& x : s) x = rng.uniform(-50, 50);
        const auto a = softmax(s);
        REQUIRE(std::fabs(std::accumulate(a.begin(), a.end(), 0.0) - 1.0) < 1e-12);
    }
    const auto big = softmax(std::vector<double>{1000.0, 1000.0});
    CHECK(big[0] == doctest::Approx(0.5));
}

TEST_CASE("identical hidden states give uniform weights") {
    Rng rng(2);
    AttentionParams p{4, 3, {}, {}};
    p.w.resize(12);
    p.v.resize(3);
    for (auto& x : p.w) x = rng.uniform(-1, 1);
    for (auto& x : p.v) x = rng.uniform(-1, 1);
    const std::size_t L = 5;
    std::vector<double> H;
    for (std::size_t t = 0; t < L; ++t) H.insert(H.end(), {0.3, -0.2, 0.9, 0.1});
    const auto r = additive_attention(H, L, p);
    for (double a : r.weights) CHECK(a == doctest::Approx(1.0 / L).epsilon(1e-14));
    for (std::size_t k = 0; k < 4; ++k) CHECK(r.context[k] == doctest::Approx(H[k]).epsilon(1e-14));
}

TEST_CASE("a dominant score selects its hidden state") {
    // hidden 1, width 1: e_t = v tanh(w h_t). With w = 1, v = 60 the score gap
    // between h = 10 and h = -10 exceeds 50.
    AttentionParams p{1, 1, {1.0}, {60.0}};
    const std::vector<double> H{-10.0, 10.0, -10.0};
    const auto r = additive_attention(H, 3, p);
    CHECK(r.weights[1] > 1.0 - 1e-9);
    CHECK(std::fabs(r.context[0] - 10.0) < 1e-9);
}

TEST_CASE("attention scores follow v . tanh(W h)") {
    Rng rng(3);
    const std::size_t d = 3, A = 2, L = 4;
    AttentionParams p{d, A, std::vector<double>(d * A), std::vector<double>(A)};
    for (auto& x : p.w) x = rng.uniform(-1, 1);
    for (auto& x : p.v) x = rng.uniform(-1, 1);
    std::vector<double> H(L * d);
    for (auto& x : H) x = rng.uniform(-1, 1);
    const auto r = additive_attention(H, L, p);
    std::vector<double> e(L);
    for (std::size_t t = 0; t < L; ++t)
        for (std::size_t a = 0; a < A; ++a) {
            double u = 0;
            for (std::size_t j = 0; j < d; ++j) u += p.w[j * A + a] * H[t * d + j];
            e[t] += p.v[a] * std::tanh(u);
        }
    const auto alpha = softmax(e);
    for (std::size_t t = 0; t < L; ++t) CHECK(r.weights[t] == doctest::Approx(alpha[t]).epsilon(1e-12));
    for (std::size_t k = 0; k < d; ++k) {
        double c = 0;
        for (std::size_t t = 0; t < L; ++t) c += alpha[t] * H[t * d + k];
        CHECK(r.context[k] == doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("attention shape errors") {
    AttentionParams p{2, 2, std::vector<double>(4), std::vector<double>(2)};
    CHECK_THROWS_AS(additive_attention(std::vector<double>(5), 2, p), ShapeError);
    CHECK_THROWS_AS(additive_attention(std::vector<double>{}, 0, p), ShapeError);
}
