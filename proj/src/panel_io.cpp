#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"
#include "burstcast/ingest.hpp"

namespace burstcast {

using nlohmann::json;

void write_panel_csv(std::ostream& out, const PanelSeries& panel) {
    out << "# grain=" << to_string(panel.grain) << '\n';
    out << "geo_id,iso_monday,count,casualties_total,killed,wounded\n";
    for (std::size_t g = 0; g < panel.n_geographies(); ++g) {
        for (std::size_t t = 0; t < panel.n_weeks(); ++t) {
            out << panel.geo_ids[g] << ',' << to_iso_string(panel.week_axis[t].monday) << ',' << panel.counts[g][t]
                << ',' << csv::format_double(panel.casualties_total[g][t]) << ','
                << csv::format_double(panel.killed[g][t]) << ',' << csv::format_double(panel.wounded[g][t]) << '\n';
        }
    }
}

PanelSeries read_panel_csv(std::istream& in) {
    PanelSeries panel;
    csv::Reader reader(in);
    auto header = reader.next();
    if (header && !header->empty() && header->front().starts_with("# grain=")) {
        auto g = parse_grain(header->front().substr(8));
        if (!g) throw ParseError(reader.record_number(), "unknown grain '" + header->front().substr(8) + "'");
        panel.grain = *g;
        header = reader.next();
    }
    const std::vector<std::string> expected{"geo_id", "iso_monday", "count", "casualties_total", "killed", "wounded"};
    if (!header || *header != expected) throw ParseError(reader.record_number(), "unexpected panel CSV header");

    struct Cell {
        long count;
        double total, killed, wounded;
    };
    std::map<long, std::map<long, Cell>> cells;  // geo -> ordinal -> cell
    std::vector<long> geo_order;
    while (auto row = reader.next()) {
        const std::size_t r = reader.record_number();
        if (row->size() == 1 && row->front().empty()) continue;
        if (row->size() != 6) throw ParseError(r, "expected 6 fields");
        auto geo = csv::parse_int((*row)[0]);
        auto monday = parse_iso_date((*row)[1]);
        auto count = csv::parse_int((*row)[2]);
        auto total = csv::parse_double((*row)[3]);
        auto killed = csv::parse_double((*row)[4]);
        auto wounded = csv::parse_double((*row)[5]);
        if (!geo || !monday || !count || !total || !killed || !wounded) throw ParseError(r, "unparseable panel row");
        const WeekId w = iso_week(*monday);
        if (w.monday != *monday) throw ParseError(r, "iso_monday is not a Monday");
        if (!cells.contains(*geo)) geo_order.push_back(*geo);
        cells[*geo][w.ordinal] = Cell{*count, *total, *killed, *wounded};
    }
    if (cells.empty()) throw DataError("panel CSV has no rows");

    for (const auto& [ord, cell] : cells.begin()->second) panel.week_axis.push_back(week_from_ordinal(ord));
    panel.geo_ids = geo_order;
    for (long geo : geo_order) {
        const auto& m = cells.at(geo);
        if (m.size() != panel.week_axis.size()) throw DataError("panel CSV: geography rows disagree on the week axis");
        std::vector<long> c;
        std::vector<double> tot, k, w;
        for (const auto& wk : panel.week_axis) {
            auto it = m.find(wk.ordinal);
            if (it == m.end()) throw DataError("panel CSV: geography rows disagree on the week axis");
            c.push_back(it->second.count);
            tot.push_back(it->second.total);
            k.push_back(it->second.killed);
            w.push_back(it->second.wounded);
        }
        panel.counts.push_back(std::move(c));
        panel.casualties_total.push_back(std::move(tot));
        panel.killed.push_back(std::move(k));
        panel.wounded.push_back(std::move(w));
    }
    panel.validate();
    return panel;
}

std::string panel_to_json(const PanelSeries& panel) {
    json j;
    j["format"] = "burstcast-panel";
    j["version"] = 1;
    j["grain"] = to_string(panel.grain);
    j["geo_ids"] = panel.geo_ids;
    std::vector<std::string> mondays;
    for (const auto& w : panel.week_axis) mondays.push_back(to_iso_string(w.monday));
    j["week_axis"] = mondays;
    j["counts"] = panel.counts;
    j["casualties_total"] = panel.casualties_total;
    j["killed"] = panel.killed;
    j["wounded"] = panel.wounded;
    return j.dump();
}

PanelSeries panel_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("panel JSON: ") + e.what());
    }
    if (j.value("format", "") != "burstcast-panel") throw DataError("panel JSON: wrong or missing format tag");
    PanelSeries panel;
    try {
        auto grain = parse_grain(j.at("grain").get<std::string>());
        if (!grain) throw DataError("panel JSON: unknown grain");
        panel.grain = *grain;
        panel.geo_ids = j.at("geo_ids").get<std::vector<long>>();
        for (const auto& s : j.at("week_axis")) {
            auto d = parse_iso_date(s.get<std::string>());
            if (!d) throw DataError("panel JSON: bad date in week_axis");
            panel.week_axis.push_back(iso_week(*d));
        }
        panel.counts = j.at("counts").get<std::vector<std::vector<long>>>();
        panel.casualties_total = j.at("casualties_total").get<std::vector<std::vector<double>>>();
        panel.killed = j.at("killed").get<std::vector<std::vector<double>>>();
        panel.wounded = j.at("wounded").get<std::vector<std::vector<double>>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("panel JSON: ") + e.what());
    }
    panel.validate();
    return panel;
}

void write_incidents_csv(std::ostream& out, std::span<const IncidentRecord> records) {
    const ColumnMap s;
    out << s.event_id << ',' << s.year << ',' << s.month << ',' << s.day << ',' << s.country << ',' << s.region << ','
        << s.latitude << ',' << s.longitude << ',' << s.killed << ',' << s.wounded << ',' << s.doubt << '\n';
    for (const auto& r : records) {
        out << csv::escape(r.event_id) << ',' << static_cast<int>(r.date.year()) << ','
            << static_cast<unsigned>(r.date.month()) << ',' << static_cast<unsigned>(r.date.day()) << ','
            << r.country_id << ',' << r.region_id << ',' << (r.latitude ? csv::format_double(*r.latitude) : "")
            << ',' << (r.longitude ? csv::format_double(*r.longitude) : "") << ',' << csv::format_double(r.killed)
            << ',' << csv::format_double(r.wounded) << ',' << (r.passes_inclusion ? 0 : 1) << '\n';
    }
}

}  // namespace burstcast
