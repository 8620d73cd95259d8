#include <doctest.h>

#include <cmath>
#include <sstream>

#include "burstcast/core/rng.hpp"
#include "burstcast/synth.hpp"

using namespace burstcast;

TEST_CASE("zero base rate gives an all-zero panel") {
    SynthConfig c;
    c.n_geographies = 3;
    c.n_weeks = 80;
    c.base_rate = {0.0};
    const auto out = generate_panel(c);
    CHECK(out.records.empty());
    CHECK(out.panel.n_geographies() == 3);
    CHECK(out.panel.n_weeks() == 80);
    for (const auto& row : out.panel.counts)
        for (long v : row) CHECK(v == 0);
    CHECK_NOTHROW(out.panel.validate());
}

TEST_CASE("generation is deterministic in the seed") {
    SynthConfig c;
    c.n_geographies = 4;
    c.n_weeks = 300;
    const auto a = generate_panel(c), b = generate_panel(c);
    CHECK(a.panel == b.panel);
    CHECK(a.raw_csv == b.raw_csv);
    c.seed = 43;
    CHECK_FALSE(generate_panel(c).panel == a.panel);
}

TEST_CASE("axis skips the gap year and counts match records") {
    SynthConfig c;
    c.n_geographies = 2;
    c.n_weeks = 1300;
    const auto out = generate_panel(c);
    REQUIRE(out.panel.n_weeks() == 1300);
    long total = 0;
    for (std::size_t i = 0; i < out.panel.n_weeks(); ++i) {
        CHECK_FALSE(in_gap_year(out.panel.week_axis[i]));
        if (i > 0 && static_cast<int>(out.panel.week_axis[i].monday.year()) != 1994)
            CHECK(out.panel.week_axis[i].ordinal == out.panel.week_axis[i - 1].ordinal + 1);
    }
    for (const auto& row : out.panel.counts)
        for (long v : row) total += v;
    CHECK(static_cast<std::size_t>(total) == out.records.size());
}

TEST_CASE("long-run mean matches the subcritical fixed point") {
    SynthConfig c;
    c.n_geographies = 12;
    c.n_weeks = 1040;
    const auto out = generate_panel(c);
    double sum = 0;
    for (const auto& row : out.panel.counts)
        for (std::size_t t = 52; t < row.size(); ++t) sum += static_cast<double>(row[t]);
    const double mean = sum / (12.0 * (1040 - 52));
    const double expected = 2.0 / (1.0 - c.eta / (1.0 - c.rho));
    CHECK(std::fabs(mean - expected) / expected < 0.05);
}

TEST_CASE("negative binomial emission is overdispersed") {
    SynthConfig c;
    c.n_geographies = 1;
    c.n_weeks = 20000;
    c.eta = 0.0;
    c.amplitude = {0.0};
    c.base_rate = {5.0};
    c.emission = Emission::negative_binomial;
    const auto out = generate_panel(c);
    double s = 0, s2 = 0;
    for (long v : out.panel.counts[0]) {
        s += static_cast<double>(v);
        s2 += static_cast<double>(v) * static_cast<double>(v);
    }
    const double n = static_cast<double>(out.panel.counts[0].size());
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::fabs(mean - 5.0) < 0.15);
    CHECK(std::fabs(var - (5.0 + 25.0 / c.nb_shape)) / 17.5 < 0.1);
}

TEST_CASE("poisson and geometric samplers") {
    Rng rng(3);
    for (double lambda : {0.3, 3.7, 40.0, 1200.0}) {
        double s = 0, s2 = 0;
        const int n = 40000;
        for (int i = 0; i < n; ++i) {
            const double v = static_cast<double>(sample_poisson(rng, lambda));
            s += v;
            s2 += v * v;
        }
        const double mean = s / n, var = s2 / n - mean * mean;
        CHECK(std::fabs(mean - lambda) < 5 * std::sqrt(lambda / n));
        CHECK(std::fabs(var - lambda) / lambda < 0.05);
    }
    CHECK(sample_poisson(rng, 0.0) == 0);
    CHECK_THROWS(sample_poisson(rng, -1.0));
    double s = 0;
    for (int i = 0; i < 40000; ++i) s += static_cast<double>(sample_geometric(rng, 1.5));
    CHECK(std::fabs(s / 40000 - 1.5) < 0.05);
}

TEST_CASE("invalid configurations are rejected") {
    auto bad = [](auto mutate) {
        SynthConfig c;
        mutate(c);
        return c;
    };
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.n_geographies = 0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.n_geographies = 13; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.eta = 0.6; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.rho = 1.0; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.amplitude = {1.5}; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.base_rate = {1, 2}; }).validate(), std::invalid_argument);
    CHECK_THROWS_AS(bad([](SynthConfig& c) { c.base_rate = {-1}; }).validate(), std::invalid_argument);
    CHECK_NOTHROW(SynthConfig{}.validate());
}

TEST_CASE("raw incident csv ingests back to the same panel") {
    SynthConfig c;
    c.n_geographies = 3;
    c.n_weeks = 200;
    const auto out = generate_panel(c);
    std::istringstream in(out.raw_csv);
    const auto parsed = parse_incidents(in);
    CHECK(parsed.records.size() == out.records.size());
    AggregateOptions opt;
    opt.geographies = std::vector<long>{1, 2, 3};
    opt.first_week = out.panel.week_axis.front().monday;
    opt.last_week = out.panel.week_axis.back().monday;
    CHECK(aggregate_weekly(parsed.records, Grain::region, opt) == out.panel);
}
