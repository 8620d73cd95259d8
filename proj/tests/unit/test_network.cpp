#include <doctest.h>

#include <cmath>
#include <numeric>

#include "burstcast/core/error.hpp"
#include "burstcast/nn/network.hpp"
#include "burstcast/nn/params.hpp"
#include "gradcheck.hpp"

using namespace burstcast;
using namespace burstcast::nn;

TEST_CASE("parameter counts") {
    ModelSpec one;
    one.variant = Variant::uni_lstm;
    one.input_width = 16;
    one.lstm_widths = {32};
    const auto layout = make_layout(one);
    CHECK(layout.at("lstm1.fwd.w_x").size() + layout.at("lstm1.fwd.w_h").size() + layout.at("lstm1.fwd.b").size() ==
          6272);
    ModelSpec dense;
    dense.variant = Variant::bilstm;
    dense.input_width = 16;
    dense.lstm_widths = {32};
    CHECK(make_layout(dense).at("dense.w").size() + make_layout(dense).at("dense.b").size() == 64 * 32 + 32);

    CHECK(count_parameters(ModelSpec::reference(Variant::bilstm, 30, 16)) == 39489);
    CHECK(count_parameters(ModelSpec::reference(Variant::lstm_attention, 30, 16)) == 35297);
    CHECK(count_parameters(ModelSpec::reference(Variant::uni_lstm, 30, 16)) == 15681);
}

TEST_CASE("layout blocks per variant") {
    const auto bi = make_layout(ModelSpec::reference(Variant::bilstm, 30, 16));
    CHECK(bi.find("lstm2.bwd.w_h"));
    CHECK_FALSE(bi.find("attention.w"));
    const auto att = make_layout(ModelSpec::reference(Variant::lstm_attention, 30, 16));
    CHECK(att.find("attention.v"));
    CHECK_FALSE(att.find("lstm1.bwd.w_x"));
    CHECK(att.at("lstm1.fwd.w_h").rows == 64);
    CHECK(att.at("dense.w").rows == 32);
    CHECK(bi.at("dense.w").rows == 64);
    CHECK(bi.at("out.w").rows == 32);
}

TEST_CASE("init is seeded, bounded and sets the forget bias") {
    const auto spec = ModelSpec::reference(Variant::bilstm, 30, 16);
    const auto a = init_params(spec, 1), b = init_params(spec, 1), c = init_params(spec, 2);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
    const auto bias = a.block("lstm1.fwd.b");
    for (std::size_t k = 0; k < 32; ++k) {
        CHECK(bias[k] == 0.0);
        CHECK(bias[32 + k] == 1.0);
    }
    for (double w : a.block("lstm1.fwd.w_x")) CHECK(std::fabs(w) <= 1.0 / std::sqrt(32.0));
}

TEST_CASE("init keeps existing input columns when one is appended") {
    auto s16 = ModelSpec::reference(Variant::uni_lstm, 30, 16);
    auto s17 = ModelSpec::reference(Variant::uni_lstm, 30, 17);
    const auto a = init_params(s16, 9), b = init_params(s17, 9);
    const auto wa = a.block("lstm1.fwd.w_x"), wb = b.block("lstm1.fwd.w_x");
    CHECK(std::equal(wa.begin(), wa.end(), wb.begin()));
    CHECK(a.block("out.w")[0] == b.block("out.w")[0]);
}

TEST_CASE("zero parameters predict zero") {
    for (auto v : {Variant::uni_lstm, Variant::lstm_attention, Variant::bilstm}) {
        const auto spec = ModelSpec::reference(v, 5, 3);
        std::vector<double> x(2 * 5 * 3, 0.7);
        const auto pred = forward_batch(zero_params(spec), x, 2);
        CHECK(pred == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("mse examples") {
    CHECK(mse_loss(std::vector<double>{0, 0}, std::vector<double>{1, 3}) == 5.0);
    CHECK(mse_loss(std::vector<double>{2, 4}, std::vector<double>{2, 4}) == 0.0);
    CHECK_THROWS(mse_loss(std::vector<double>{1}, std::vector<double>{1, 2}));
}

TEST_CASE("zero residual gives zero gradient") {
    const auto spec = ModelSpec::reference(Variant::lstm_attention, 4, 2);
    const auto p = init_params(spec, 3);
    std::vector<double> x(3 * 4 * 2);
    Rng rng(1);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const auto y = forward_batch(p, x, 3);
    const auto g = backward_batch(p, x, y);
    for (double v : g.values) CHECK(v == 0.0);
    CHECK(g.find("attention.w"));
    CHECK_FALSE(g.find("lstm1.bwd.w_x"));
}

TEST_CASE("analytic gradients match central differences") {
    for (auto v : {Variant::uni_lstm, Variant::lstm_attention, Variant::bilstm})
        for (std::uint64_t seed = 0; seed < 6; ++seed) {
            const auto spec = oracle::tiny_spec(v, seed);
            const auto r = oracle::check_gradient(spec, seed);
            INFO(to_string(v) << " seed " << seed);
            CHECK(r.max_rel_error < 1e-4);
        }
}

TEST_CASE("dropout only acts in training mode and is seeded") {
    const auto spec = ModelSpec::reference(Variant::bilstm, 6, 3, 0.5);
    const auto p = init_params(spec, 4);
    std::vector<double> x(2 * 6 * 3);
    Rng rng(2);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const auto e1 = forward_batch(p, x, 2, Mode::eval, 1), e2 = forward_batch(p, x, 2, Mode::eval, 2);
    CHECK(e1 == e2);
    const auto t1 = forward_batch(p, x, 2, Mode::train, 1), t1b = forward_batch(p, x, 2, Mode::train, 1);
    const auto t2 = forward_batch(p, x, 2, Mode::train, 2);
    CHECK(t1 == t1b);
    CHECK(t1 != t2);
    CHECK(t1 != e1);
}

TEST_CASE("serial and parallel batch gradients are bit-identical") {
    const auto spec = ModelSpec::reference(Variant::bilstm, 8, 4);
    const auto p = init_params(spec, 5);
    const Network net(spec);
    const std::size_t N = 37;
    std::vector<double> x(N * 8 * 4), y(N);
    Rng rng(6);
    for (auto& v : x) v = rng.uniform(-1, 1);
    for (auto& v : y) v = rng.uniform(-1, 1);
    const SampleView view{x.data(), 8 * 4, y};
    std::vector<std::size_t> batch(N);
    std::iota(batch.begin(), batch.end(), 0);
    const auto a = batch_loss_gradient(net, p.values, view, batch, 11, Exec::serial);
    const auto b = batch_loss_gradient(net, p.values, view, batch, 11, Exec::parallel);
    CHECK(a.loss == b.loss);
    CHECK(a.grad == b.grad);
    CHECK(predict(net, p.values, view, Exec::serial) == predict(net, p.values, view, Exec::parallel));
}

TEST_CASE("checked entry points reject bad shapes") {
    const auto spec = ModelSpec::reference(Variant::uni_lstm, 3, 2);
    const auto p = init_params(spec, 1);
    CHECK_THROWS_AS(forward_batch(p, std::vector<double>(5), 1), ShapeError);
    CHECK_THROWS_AS(backward_batch(p, std::vector<double>(6), std::vector<double>(2)), ShapeError);
    ModelSpec bad = spec;
    bad.dropout = 1.0;
    CHECK_THROWS_AS(bad.validate(), ShapeError);
}
