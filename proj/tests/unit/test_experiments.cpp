#include <doctest.h>

#include <cmath>
#include <sstream>

#include "burstcast/experiments/ablations.hpp"
#include "burstcast/experiments/config.hpp"

using namespace burstcast;
using namespace burstcast::experiments;
using nlohmann::json;

namespace {

json small_doc() {
    return json::parse(R"({
      "seed": 42,
      "data": {"source": "synth", "synth": {"n_geographies": 3, "n_weeks": 400}},
      "train": {"max_epochs": 1, "batch_size": 32, "lookback": 5},
      "models": ["seasonal_naive", "linear", "bilstm"],
      "ablations": {"sequence_lengths": [3, 5], "reference_lookback": 5, "noise_floor_seeds": 1,
                    "history_spans": [2, 4, "full"]}
    })");
}

ResultTable run(const std::string& family, const ExperimentConfig& cfg) {
    const auto data = load_data(cfg.data);
    return run_family(family, RunContext{cfg, data.panel, {}});
}

}  // namespace

TEST_CASE("config parsing fills defaults and rejects unknown keys") {
    const auto cfg = parse_config(small_doc());
    CHECK(cfg.seed == 42);
    CHECK(cfg.data.kind == SourceKind::synth);
    CHECK(cfg.data.synth.n_geographies == 3);
    CHECK(cfg.train.max_epochs == 1);
    CHECK(cfg.lookback == 5);
    CHECK(cfg.ablations.sequence_lengths == std::vector<std::size_t>{3, 5});
    CHECK(cfg.ablations.history_spans.back() == std::nullopt);

    auto bad = small_doc();
    bad["train"]["epochs"] = 3;
    bad["bogus"] = 1;
    try {
        parse_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.issues().size() == 2);
    }
    auto wrong_type = small_doc();
    wrong_type["train"]["batch_size"] = "big";
    CHECK_THROWS_AS(parse_config(wrong_type), ConfigError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("resolved config round-trips and hashes stably") {
    const auto cfg = parse_config(small_doc());
    const auto again = parse_config(to_json(cfg));
    CHECK(to_json(again) == to_json(cfg));
    CHECK(config_hash(again) == config_hash(cfg));
    CHECK(config_hash(cfg).size() == 16);
    auto other = cfg;
    other.seed = 43;
    CHECK(config_hash(other) != config_hash(cfg));
}

TEST_CASE("result table serialization") {
    ResultTable t;
    t.family = "main";
    t.seed = 7;
    t.config_hash = "abc";
    ResultRow r;
    r.config_label = "bilstm";
    r.model = "bilstm";
    r.samples = 10;
    r.rmse = 1.25;
    r.improvement = 12.5;
    t.rows.push_back(r);
    ResultRow f;
    f.config_label = "sarima";
    f.model = "sarima";
    f.status = "failed: no fit";
    t.rows.push_back(f);
    CHECK(t.any_failed());
    CHECK(t.find("bilstm")->rmse == 1.25);
    CHECK(t.find("nothing") == nullptr);
    const auto back = ResultTable::from_json(t.to_json());
    CHECK(back.to_json() == t.to_json());
    std::ostringstream csv;
    t.write_csv(csv);
    CHECK(csv.str().find("bilstm") != std::string::npos);
    CHECK(t.to_markdown().find("| bilstm |") != std::string::npos);
}

TEST_CASE("test gate refuses a second evaluation") {
    TestGate gate;
    EvalTargets t;
    t.actual = {1, 2};
    t.geo_id = {1, 1};
    const std::vector<double> p{1, 2};
    CHECK_NOTHROW(gate.evaluate("m", p, t));
    CHECK_THROWS_AS(gate.evaluate("m", p, t), std::logic_error);
    CHECK_NOTHROW(gate.evaluate("n", p, t));
    CHECK(gate.evaluations() == 2);
}

TEST_CASE("small ablation tables have the configured structure") {
    const auto cfg = parse_config(small_doc());

    const auto seq = run("seqlen", cfg);
    REQUIRE(seq.rows.size() == 2);
    CHECK(seq.rows[0].samples == seq.rows[1].samples);

    const auto feat = run("features", cfg);
    std::vector<std::size_t> counts;
    for (const auto& r : feat.rows) counts.push_back(r.n_features.value_or(0));
    CHECK(counts == std::vector<std::size_t>{16, 15, 10, 11, 13, 15});

    const auto hist = run("history", cfg);
    REQUIRE(hist.rows.size() == 3);
    CHECK(*hist.rows[0].samples < *hist.rows[1].samples);
    CHECK(*hist.rows[1].samples < *hist.rows[2].samples);
}

TEST_CASE("main comparison is deterministic") {
    const auto cfg = parse_config(small_doc());
    const auto a = run("main", cfg), b = run("main", cfg);
    CHECK(a.to_json().dump() == b.to_json().dump());
    REQUIRE(a.rows.size() == 3);
    for (const auto& r : a.rows) CHECK(r.ok());
    CHECK(a.rows[2].improvement.has_value());
    CHECK_THROWS(run("nonsense", cfg));
}

TEST_CASE("an all-zero dummy column stays inside the noise floor") {
    auto doc = small_doc();
    doc["ablations"]["feature_groups"] = {"dummy"};
    doc["ablations"]["noise_floor_seeds"] = 2;
    const auto t = run("features", parse_config(doc));
    const auto* row = t.find("+dummy");
    REQUIRE(row != nullptr);
    CHECK(row->n_features == 17);
    REQUIRE(row->delta_rmse.has_value());
    const double floor = t.notes.at("noise_floor").get<double>();
    CHECK(std::fabs(*row->delta_rmse) < floor);
}
