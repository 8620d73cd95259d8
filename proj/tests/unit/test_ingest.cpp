#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

#include "burstcast/core/error.hpp"
#include "burstcast/core/rng.hpp"
#include "burstcast/ingest.hpp"
#include "oracles.hpp"

using namespace burstcast;
using namespace std::chrono;

namespace {

const char* kHeader = "eventid,iyear,imonth,iday,region,country,latitude,longitude,nkill,nwound,doubtterr\n";

ParsedIncidents parse(const std::string& body) {
    std::istringstream in(std::string(kHeader) + body);
    return parse_incidents(in);
}

IncidentRecord event(const char* id, Date d, int region, double killed = 0) {
    IncidentRecord r;
    r.event_id = id;
    r.date = d;
    r.region_id = region;
    r.country_id = 100 + region;
    r.killed = killed;
    return r;
}

}  // namespace

TEST_CASE("duplicate event ids keep the first row") {
    auto p = parse("197001010001,1970,1,1,2,5,,,1,0,0\n197001010001,1970,1,1,3,5,,,4,0,0\n");
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].region_id == 2);
    CHECK(p.report.count(RejectReason::duplicate) == 1);
    CHECK(p.report.total() == 1);
    CHECK(p.report.rows_read == 2);
}

TEST_CASE("missing casualties are imputed as zero") {
    auto p = parse("1,1970,1,5,2,5,,,,,0\n");
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].killed == 0.0);
    CHECK(p.records[0].wounded == 0.0);
    CHECK_FALSE(p.records[0].latitude);
}

TEST_CASE("rejection reasons") {
    auto p = parse(
        "1,1970,1,0,2,5,,,0,0,0\n"   // unknown day
        "2,1970,2,30,2,5,,,0,0,0\n"  // impossible day
        "3,1970,1,5,,5,,,0,0,0\n"    // missing region
        "4,1970,1,5,13,5,,,0,0,0\n"  // region out of range
        ",1970,1,5,2,5,,,0,0,0\n"    // missing id
        "6,1970,1,5,2,5,,,0,0,1\n"   // doubt flagged
        "7,1970,1,5,2,5,,,0,0,-9\n"  // doubt unknown: kept
        "8,1970,1,5,2,5,,,0,0,\n");  // doubt empty: kept
    CHECK(p.report.count(RejectReason::invalid_date) == 2);
    CHECK(p.report.count(RejectReason::missing_geography) == 2);
    CHECK(p.report.count(RejectReason::missing_event_id) == 1);
    CHECK(p.report.count(RejectReason::failed_inclusion) == 1);
    CHECK(p.records.size() == 2);
}

TEST_CASE("malformed input raises structured errors") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_incidents(empty), DataError);
    std::istringstream no_col("eventid,iyear\n1,1970\n");
    CHECK_THROWS_AS(parse_incidents(no_col), ParseError);
    try {
        parse("1,1970,1,5,2,5,,,0,0,0\n2,1970,1,5,2\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
    try {
        parse("1,1970,1,5,2,5,,,abc,0,0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 2);
    }
}

TEST_CASE("custom column map and delimiter") {
    ColumnMap m;
    m.event_id = "id";
    m.killed = "dead";
    m.delimiter = ';';
    std::istringstream in("id;iyear;imonth;iday;region;country;latitude;longitude;dead;nwound;doubtterr\n"
                          "9;1980;3;4;1;7;1.5;2.5;3;1;0\n");
    auto p = parse_incidents(in, m);
    REQUIRE(p.records.size() == 1);
    CHECK(p.records[0].killed == 3.0);
    CHECK(p.records[0].latitude == 1.5);
}

TEST_CASE("winsorize uses the nearest-rank quantile") {
    CHECK(winsorize(std::vector<double>{5, 5, 5, 5}, 0.99) == std::vector<double>{5, 5, 5, 5});
    CHECK(winsorize(std::vector<double>{0, 1000}, 0.5) == std::vector<double>{0, 0});
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    auto w = winsorize(v, 0.99);
    for (std::size_t i = 0; i < 100; ++i) CHECK(w[i] == std::min(v[i], 99.0));
    CHECK_THROWS_AS(winsorize(std::vector<double>{}, 0.99), DataError);
}

TEST_CASE("winsorize matches a sort-based oracle") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(rng.below(30));
        const double q = 0.05 + 0.95 * rng.uniform();
        std::vector<double> sorted = v;
        std::sort(sorted.begin(), sorted.end());
        std::size_t rank = 1;
        while (static_cast<double>(rank) < q * static_cast<double>(n) - 1e-9) ++rank;
        const double cap = sorted[rank - 1];
        const auto w = winsorize(v, q);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(w[i] == std::min(v[i], cap));
    }
}

TEST_CASE("aggregate_weekly counts per geography and week") {
    std::vector<IncidentRecord> recs{event("a", year{1970} / 1 / 6, 3), event("b", year{1970} / 1 / 8, 3),
                                     event("c", year{1970} / 1 / 20, 5)};
    AggregateOptions opt;
    opt.winsor_quantile = 1.0;
    const auto p = aggregate_weekly(recs, Grain::region, opt);
    REQUIRE(p.n_geographies() == 12);
    REQUIRE(p.n_weeks() == 3);
    for (std::size_t g = 0; g < 12; ++g)
        for (std::size_t t = 0; t < 3; ++t) {
            long expect = 0;
            if (g == 2 && t == 0) expect = 2;
            if (g == 4 && t == 2) expect = 1;
            CHECK(p.counts[g][t] == expect);
        }
    p.validate();
    CHECK_THROWS_AS(aggregate_weekly(std::vector<IncidentRecord>{}, Grain::region), DataError);
}

TEST_CASE("weeks in 1993 are removed from the axis") {
    std::vector<IncidentRecord> recs{event("a", year{1993} / 6 / 15, 1), event("b", year{1994} / 6 / 15, 1)};
    AggregateReport rep;
    const auto p = aggregate_weekly(recs, Grain::region, {}, &rep);
    for (const auto& w : p.week_axis) CHECK(static_cast<int>(w.monday.year()) != 1993);
    CHECK(std::accumulate(p.counts[0].begin(), p.counts[0].end(), 0L) == 1);
    CHECK(p.counts[0].back() == 1);
    CHECK(rep.records_in_gap_weeks == 1);
    CHECK(rep.gap_weeks_removed > 0);
    for (std::size_t g = 1; g < 12; ++g)
        CHECK(std::all_of(p.counts[g].begin(), p.counts[g].end(), [](long c) { return c == 0; }));
}

TEST_CASE("country grain and casualty winsorization") {
    std::vector<IncidentRecord> recs;
    for (int i = 0; i < 40; ++i) {
        auto r = event(("e" + std::to_string(i)).c_str(), year_month_day{sys_days{year{1980} / 1 / 7} + days{7 * i}}, 2,
                       i == 39 ? 1000 : 1);
        recs.push_back(r);
    }
    AggregateOptions opt;
    opt.winsor_quantile = 0.9;
    const auto p = aggregate_weekly(recs, Grain::country, opt);
    REQUIRE(p.geo_ids == std::vector<long>{102});
    CHECK(*std::max_element(p.killed[0].begin(), p.killed[0].end()) == 1.0);
    CHECK(p.counts[0].back() == 1);
}

TEST_CASE("panel csv and json round-trip exactly") {
    auto panel = oracle::random_panel(3, 80, 9);
    panel.casualties_total[1][4] = 0.1 + 0.2;
    std::stringstream s;
    write_panel_csv(s, panel);
    CHECK(read_panel_csv(s) == panel);
    CHECK(panel_from_json(panel_to_json(panel)) == panel);
}

TEST_CASE("incident csv round-trip through parse_incidents") {
    std::vector<IncidentRecord> recs{event("x1", year{1975} / 3 / 4, 4, 2), event("x2", year{1976} / 5 / 6, 7, 0)};
    recs[0].latitude = 12.25;
    recs[1].wounded = 3;
    std::stringstream s;
    write_incidents_csv(s, recs);
    auto p = parse_incidents(s);
    REQUIRE(p.records.size() == 2);
    CHECK(p.report.total() == 0);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(p.records[i].event_id == recs[i].event_id);
        CHECK(p.records[i].date == recs[i].date);
        CHECK(p.records[i].region_id == recs[i].region_id);
        CHECK(p.records[i].killed == recs[i].killed);
        CHECK(p.records[i].wounded == recs[i].wounded);
        CHECK(p.records[i].latitude == recs[i].latitude);
    }
}
