#include "burstcast/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "burstcast/core/csv.hpp"
#include "burstcast/core/error.hpp"

namespace burstcast {

const char* to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::invalid_date: return "invalid_date";
        case RejectReason::missing_geography: return "missing_geography";
        case RejectReason::missing_event_id: return "missing_event_id";
        case RejectReason::failed_inclusion: return "failed_inclusion";
        case RejectReason::duplicate: return "duplicate";
    }
    return "unknown";
}

std::size_t RejectionReport::total() const {
    std::size_t n = 0;
    for (const auto& [reason, c] : counts) n += c;
    return n;
}

std::size_t RejectionReport::count(RejectReason r) const {
    auto it = counts.find(r);
    return it == counts.end() ? 0 : it->second;
}

const char* to_string(Grain grain) { return grain == Grain::region ? "region" : "country"; }

std::optional<Grain> parse_grain(std::string_view text) {
    if (text == "region") return Grain::region;
    if (text == "country") return Grain::country;
    return std::nullopt;
}

namespace {

constexpr int kNoColumn = -1;

struct ColumnIndex {
    int event_id, year, month, day, region, country;
    int latitude, longitude, killed, wounded, doubt;
};

int find_column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (csv::trim(header[i]) == name) return static_cast<int>(i);
    return kNoColumn;
}

ColumnIndex resolve_columns(const std::vector<std::string>& header, const ColumnMap& schema) {
    auto required = [&](const std::string& name) {
        const int idx = find_column(header, name);
        if (idx == kNoColumn) throw ParseError(1, "header is missing required column '" + name + "'");
        return idx;
    };
    ColumnIndex c{};
    c.event_id = required(schema.event_id);
    c.year = required(schema.year);
    c.month = required(schema.month);
    c.day = required(schema.day);
    c.region = required(schema.region);
    c.country = required(schema.country);
    c.latitude = find_column(header, schema.latitude);
    c.longitude = find_column(header, schema.longitude);
    c.killed = find_column(header, schema.killed);
    c.wounded = find_column(header, schema.wounded);
    c.doubt = find_column(header, schema.doubt);
    return c;
}

class RowView {
public:
    RowView(const std::vector<std::string>& fields, std::size_t row, const std::vector<std::string>& header)
        : fields_(fields), row_(row), header_(header) {}

    std::string_view text(int col) const {
        return col == kNoColumn ? std::string_view{} : csv::trim(fields_[static_cast<std::size_t>(col)]);
    }

    /// Empty -> nullopt; junk -> ParseError.
    std::optional<long long> integer(int col) const {
        auto t = text(col);
        if (t.empty()) return std::nullopt;
        auto v = csv::parse_int(t);
        if (!v) fail(col, t);
        return v;
    }

    std::optional<double> real(int col) const {
        auto t = text(col);
        if (t.empty()) return std::nullopt;
        auto v = csv::parse_double(t);
        if (!v) fail(col, t);
        return v;
    }

private:
    [[noreturn]] void fail(int col, std::string_view t) const {
        throw ParseError(row_, "column '" + header_[static_cast<std::size_t>(col)] + "' has non-numeric value '" +
                                   std::string(t) + "'");
    }

    const std::vector<std::string>& fields_;
    std::size_t row_;
    const std::vector<std::string>& header_;
};

double casualty_value(std::optional<double> v) {
    // Missing means none reported; negative codes are "unknown" sentinels.
    if (!v || *v < 0.0) return 0.0;
    return *v;
}

}  // namespace

ParsedIncidents parse_incidents(std::istream& in, const ColumnMap& schema) {
    csv::Reader reader(in, schema.delimiter);
    auto header = reader.next();
    if (!header || (header->size() == 1 && csv::trim((*header)[0]).empty()))
        throw DataError("incident input is empty (no header row)");
    if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) header->front().erase(0, 3);
    const ColumnIndex col = resolve_columns(*header, schema);

    ParsedIncidents out;
    std::unordered_set<std::string> seen;
    auto reject = [&](RejectReason r) { ++out.report.counts[r]; };

    while (auto fields = reader.next()) {
        if (fields->size() == 1 && csv::trim((*fields)[0]).empty()) continue;
        const std::size_t row = reader.record_number();
        if (fields->size() != header->size())
            throw ParseError(row, "expected " + std::to_string(header->size()) + " fields, found " +
                                      std::to_string(fields->size()));
        ++out.report.rows_read;
        const RowView v(*fields, row, *header);

        const std::string id(v.text(col.event_id));
        if (id.empty()) {
            reject(RejectReason::missing_event_id);
            continue;
        }
        if (!seen.insert(id).second) {
            reject(RejectReason::duplicate);
            continue;
        }

        const auto y = v.integer(col.year);
        const auto m = v.integer(col.month);
        const auto d = v.integer(col.day);
        std::optional<Date> date;
        if (y && m && d) date = make_date(static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d));
        if (!date) {
            reject(RejectReason::invalid_date);
            continue;
        }

        const auto region = v.integer(col.region);
        const auto country = v.integer(col.country);
        if (!region || *region < 1 || *region > 12 || !country || *country < 1) {
            reject(RejectReason::missing_geography);
            continue;
        }

        const auto doubt = v.integer(col.doubt);
        if (doubt && *doubt == 1) {
            reject(RejectReason::failed_inclusion);
            continue;
        }

        IncidentRecord rec;
        rec.event_id = id;
        rec.date = *date;
        rec.region_id = static_cast<int>(*region);
        rec.country_id = static_cast<long>(*country);
        rec.latitude = v.real(col.latitude);
        rec.longitude = v.real(col.longitude);
        rec.killed = casualty_value(v.real(col.killed));
        rec.wounded = casualty_value(v.real(col.wounded));
        rec.passes_inclusion = true;
        out.records.push_back(std::move(rec));
    }
    return out;
}

std::vector<double> winsorize(std::span<const double> values, double upper_quantile) {
    if (values.empty()) throw DataError("winsorize: empty input");
    if (!(upper_quantile > 0.0 && upper_quantile <= 1.0))
        throw std::invalid_argument("winsorize: quantile must lie in (0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    // Nearest rank; the epsilon absorbs representation error in q*n (0.99*100).
    auto rank = static_cast<std::size_t>(std::ceil(upper_quantile * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    const double cap = sorted[rank - 1];
    std::vector<double> out(values.begin(), values.end());
    for (double& x : out) x = std::min(x, cap);
    return out;
}

std::vector<WeekId> build_week_axis(Date first, Date last) {
    const WeekId a = iso_week(first);
    const WeekId b = iso_week(last);
    std::vector<WeekId> axis;
    for (long o = a.ordinal; o <= b.ordinal; ++o) {
        WeekId w = week_from_ordinal(o);
        if (!in_gap_year(w)) axis.push_back(w);
    }
    return axis;
}

void PanelSeries::validate() const {
    const std::size_t g = geo_ids.size();
    const std::size_t t = week_axis.size();
    auto check_shape = [&](const auto& panel, const char* name) {
        if (panel.size() != g) throw DataError(std::string("panel: ") + name + " has wrong geography count");
        for (const auto& v : panel)
            if (v.size() != t) throw DataError(std::string("panel: ") + name + " vector length differs from axis");
    };
    check_shape(counts, "counts");
    check_shape(casualties_total, "casualties_total");
    check_shape(killed, "killed");
    check_shape(wounded, "wounded");
    for (std::size_t i = 0; i < t; ++i) {
        if (in_gap_year(week_axis[i])) throw DataError("panel: axis contains a gap-year week");
        if (i > 0 && week_axis[i].ordinal <= week_axis[i - 1].ordinal)
            throw DataError("panel: week axis is not strictly increasing");
    }
    for (const auto& v : counts)
        for (long c : v)
            if (c < 0) throw DataError("panel: negative count");
}

PanelSeries aggregate_weekly(std::span<const IncidentRecord> records, Grain grain, const AggregateOptions& options,
                             AggregateReport* report) {
    if (records.empty()) throw DataError("aggregate_weekly: no records");

    auto geo_of = [grain](const IncidentRecord& r) -> long {
        return grain == Grain::region ? static_cast<long>(r.region_id) : r.country_id;
    };

    PanelSeries panel;
    panel.grain = grain;
    if (options.geographies) {
        panel.geo_ids = *options.geographies;
    } else if (grain == Grain::region) {
        panel.geo_ids.resize(12);
        std::iota(panel.geo_ids.begin(), panel.geo_ids.end(), 1L);
    } else {
        for (const auto& r : records) panel.geo_ids.push_back(geo_of(r));
        std::sort(panel.geo_ids.begin(), panel.geo_ids.end());
        panel.geo_ids.erase(std::unique(panel.geo_ids.begin(), panel.geo_ids.end()), panel.geo_ids.end());
    }

    Date first = options.first_week.value_or(records.front().date);
    Date last = options.last_week.value_or(records.front().date);
    if (!options.first_week || !options.last_week) {
        for (const auto& r : records) {
            if (!options.first_week && std::chrono::sys_days{r.date} < std::chrono::sys_days{first}) first = r.date;
            if (!options.last_week && std::chrono::sys_days{r.date} > std::chrono::sys_days{last}) last = r.date;
        }
    }
    panel.week_axis = build_week_axis(first, last);
    if (panel.week_axis.empty()) throw DataError("aggregate_weekly: every week falls in the excluded gap year");

    const long first_ord = iso_week(first).ordinal;
    const long span = iso_week(last).ordinal - first_ord + 1;
    std::vector<long> position(static_cast<std::size_t>(std::max(span, 0L)), -1);
    for (std::size_t i = 0; i < panel.week_axis.size(); ++i)
        position[static_cast<std::size_t>(panel.week_axis[i].ordinal - first_ord)] = static_cast<long>(i);

    std::unordered_map<long, std::size_t> geo_index;
    for (std::size_t i = 0; i < panel.geo_ids.size(); ++i) geo_index.emplace(panel.geo_ids[i], i);

    const std::size_t G = panel.geo_ids.size();
    const std::size_t T = panel.week_axis.size();
    panel.counts.assign(G, std::vector<long>(T, 0));
    std::vector<double> total(G * T, 0.0), killed(G * T, 0.0), wounded(G * T, 0.0);

    // Sum in a canonical record order so floating casualty totals do not
    // depend on input order.
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = records[a];
        const auto& y = records[b];
        return std::tie(x.event_id, x.region_id, x.country_id, x.killed, x.wounded) <
               std::tie(y.event_id, y.region_id, y.country_id, y.killed, y.wounded);
    });

    AggregateReport local;
    for (std::size_t k : order) {
        const auto& r = records[k];
        const WeekId w = iso_week(r.date);
        if (in_gap_year(w)) {
            ++local.records_in_gap_weeks;
            continue;
        }
        const long off = w.ordinal - first_ord;
        if (off < 0 || off >= span) {
            ++local.records_outside_axis;
            continue;
        }
        auto gi = geo_index.find(geo_of(r));
        if (gi == geo_index.end()) {
            ++local.records_unknown_geography;
            continue;
        }
        const std::size_t g = gi->second;
        const auto t = static_cast<std::size_t>(position[static_cast<std::size_t>(off)]);
        ++panel.counts[g][t];
        total[g * T + t] += r.killed + r.wounded;
        killed[g * T + t] += r.killed;
        wounded[g * T + t] += r.wounded;
    }
    local.gap_weeks_removed = static_cast<std::size_t>(span) - T;

    auto reshape = [&](const std::vector<double>& flat) {
        const auto w = winsorize(flat, options.winsor_quantile);
        std::vector<std::vector<double>> out(G);
        for (std::size_t g = 0; g < G; ++g) out[g].assign(w.begin() + g * T, w.begin() + (g + 1) * T);
        return out;
    };
    panel.casualties_total = reshape(total);
    panel.killed = reshape(killed);
    panel.wounded = reshape(wounded);

    if (report) *report = local;
    return panel;
}

}  // namespace burstcast
