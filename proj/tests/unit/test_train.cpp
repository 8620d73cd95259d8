#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "burstcast/core/error.hpp"
#include "burstcast/dataset.hpp"
#include "burstcast/nn/adam.hpp"
#include "burstcast/nn/checkpoint.hpp"
#include "burstcast/nn/train.hpp"
#include "oracles.hpp"

using namespace burstcast;
using namespace burstcast::nn;

TEST_CASE("adam on w^2 converges toward zero") {
    std::vector<double> w{1.0};
    AdamState st(1);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> g{2 * w[0]};
        adam_step(w, g, st, 0.1);
    }
    CHECK(std::fabs(w[0]) < 0.1);
    CHECK(st.step == 100);
}

TEST_CASE("adam first step moves by lr against the gradient sign") {
    std::vector<double> w{0.5, -0.5, 2.0};
    AdamState st(3);
    adam_step(w, std::vector<double>{3.0, -0.01, 0.0}, st, 0.01);
    CHECK(w[0] == doctest::Approx(0.49).epsilon(1e-6));
    CHECK(w[1] == doctest::Approx(-0.49).epsilon(1e-4));
    CHECK(w[2] == 2.0);
}

TEST_CASE("adam with zero gradients leaves parameters unchanged") {
    std::vector<double> w{0.3, -7.0};
    AdamState st(2);
    for (int i = 0; i < 50; ++i) adam_step(w, std::vector<double>{0.0, 0.0}, st, 0.5);
    CHECK(w == std::vector<double>{0.3, -7.0});
}

TEST_CASE("adam rejects non-finite gradients before touching state") {
    std::vector<double> w{1.0, 2.0};
    AdamState st(2);
    const auto before = st;
    CHECK_THROWS_AS(adam_step(w, std::vector<double>{0.1, std::numeric_limits<double>::quiet_NaN()}, st, 0.1),
                    TrainingError);
    CHECK(w == std::vector<double>{1.0, 2.0});
    CHECK(st == before);
}

TEST_CASE("epoch controller: strictly improving runs to the epoch limit") {
    EpochController c(15, 50, 1e-3, 0.5, 5, 1e-6, 1e-6);
    EpochController::Decision d;
    for (int e = 1; e <= 50; ++e) {
        d = c.observe(100.0 - e, 100.0 - e);
        CHECK(d.checkpoint);
        if (e < 50) CHECK_FALSE(d.stop);
    }
    CHECK(d.stop);
    CHECK(c.best_epoch() == 50);
    CHECK(c.learning_rate() == 1e-3);
}

TEST_CASE("epoch controller: constant validation stops after patience") {
    EpochController c(15, 50, 1e-3, 0.5, 5, 1e-6, 1e-6);
    std::size_t stopped = 0;
    for (int e = 1; e <= 50 && !stopped; ++e)
        if (c.observe(3.0, 3.0).stop) stopped = static_cast<std::size_t>(e);
    CHECK(stopped == 16);
    CHECK(c.best_epoch() == 1);
    // Plateau halvings after epochs 6 and 11 and 16.
    CHECK(c.learning_rate() == doctest::Approx(1e-3 / 8));
}

TEST_CASE("epoch controller: learning rate floor and variant patience") {
    EpochController c(100, 100, 1e-5, 0.1, 1, 0.0, 1e-6);
    for (int e = 0; e < 5; ++e) c.observe(1.0, 1.0);
    CHECK(c.learning_rate() == 1e-6);
    TrainConfig tc;
    CHECK(tc.patience_for(Variant::lstm_attention) == 10);
    CHECK(tc.patience_for(Variant::bilstm) == 15);
    tc.early_stop_patience = 3;
    CHECK(tc.patience_for(Variant::bilstm) == 3);
    tc.batch_size = 0;
    CHECK_THROWS_AS(tc.validate(), std::invalid_argument);
}

namespace {

SequenceSplits tiny_sequences() {
    const auto panel = oracle::make_panel(2, 200, [](std::size_t g, std::size_t t) {
        return static_cast<long>(3 + 2 * std::sin(static_cast<double>(t) / 4.0 + static_cast<double>(g)));
    });
    const auto fm = build_features(panel, FeatureConfig::compact());
    const auto split = chronological_split(fm.n_rows());
    return make_sequences(fm, fit_scaler(fm, split), split, 6);
}

TrainConfig tiny_config() {
    TrainConfig c;
    c.max_epochs = 3;
    c.learning_rate = 1e-2;
    c.batch_size = 16;
    return c;
}

}  // namespace

TEST_CASE("training is deterministic and independent of the execution mode") {
    const auto seq = tiny_sequences();
    auto spec = ModelSpec::reference(Variant::bilstm, 6, 16);
    spec.lstm_widths = {4, 4};
    spec.dense_width = 4;
    auto cfg = tiny_config();
    const auto a = train(spec, seq.train, seq.val, cfg);
    const auto b = train(spec, seq.train, seq.val, cfg);
    cfg.exec = Exec::serial;
    const auto c = train(spec, seq.train, seq.val, cfg);
    CHECK(a.params.values == b.params.values);
    CHECK(a.history == b.history);
    CHECK(a.params.values == c.params.values);
    CHECK(a.optimizer == c.optimizer);
    CHECK(a.epochs_ran() == 3);
    CHECK(a.history.front().train_loss > a.history.back().train_loss);
    cfg.seed = 43;
    CHECK(train(spec, seq.train, seq.val, cfg).params.values != a.params.values);
}

TEST_CASE("the best checkpoint is the one returned") {
    const auto seq = tiny_sequences();
    auto spec = ModelSpec::reference(Variant::uni_lstm, 6, 16);
    spec.lstm_widths = {3};
    spec.dense_width = 3;
    auto cfg = tiny_config();
    cfg.max_epochs = 6;
    cfg.learning_rate = 0.05;
    const auto m = train(spec, seq.train, seq.val, cfg);
    const auto pred = m.predict(seq.val);
    double sq = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) sq += (pred[i] - seq.val.targets_raw[i]) * (pred[i] - seq.val.targets_raw[i]);
    const double rmse = std::sqrt(sq / static_cast<double>(pred.size()));
    double best = 1e300;
    for (const auto& h : m.history) best = std::min(best, h.val_rmse);
    CHECK(rmse == doctest::Approx(best).epsilon(1e-12));
    CHECK(m.history[m.best_epoch - 1].val_rmse == best);
}

TEST_CASE("empty partitions are rejected") {
    const auto seq = tiny_sequences();
    const auto spec = ModelSpec::reference(Variant::uni_lstm, 6, 16);
    CHECK_THROWS_AS(train(spec, SequenceSet{}, seq.val, tiny_config()), TrainingError);
    CHECK_THROWS_AS(train(spec, seq.train, SequenceSet{}, tiny_config()), TrainingError);
}

TEST_CASE("checkpoints round-trip exactly") {
    const auto seq = tiny_sequences();
    auto spec = ModelSpec::reference(Variant::lstm_attention, 6, 16);
    spec.lstm_widths = {3, 2};
    spec.attention_width = 2;
    spec.dense_width = 2;
    auto cfg = tiny_config();
    cfg.max_epochs = 2;
    const auto m = train(spec, seq.train, seq.val, cfg);
    const auto back = checkpoint_from_json(checkpoint_to_json(m));
    CHECK(back.params.spec == m.params.spec);
    CHECK(back.params.values == m.params.values);
    CHECK(back.history == m.history);
    CHECK(back.optimizer == m.optimizer);
    CHECK(back.best_epoch == m.best_epoch);
    CHECK(back.predict(seq.test) == m.predict(seq.test));
    const auto path = std::filesystem::temp_directory_path() / "burstcast_ckpt_test.json";
    save_checkpoint(m, path);
    CHECK(load_checkpoint(path).params.values == m.params.values);
    std::filesystem::remove(path);
    CHECK_THROWS(checkpoint_from_json("{\"format\":\"something-else\"}"));
}
