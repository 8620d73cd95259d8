#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "burstcast/core/calendar.hpp"

namespace burstcast {

/// One cleaned incident row.
struct IncidentRecord {
    std::string event_id;
    Date date;
    int region_id = 0;
    long country_id = 0;
    std::optional<double> latitude;
    std::optional<double> longitude;
    double killed = 0.0;
    double wounded = 0.0;
    bool passes_inclusion = true;
};

/// Column names for each field. The defaults are the catalog's own names.
struct ColumnMap {
    std::string event_id = "eventid";
    std::string year = "iyear";
    std::string month = "imonth";
    std::string day = "iday";
    std::string region = "region";
    std::string country = "country";
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string killed = "nkill";
    std::string wounded = "nwound";
    std::string doubt = "doubtterr";
    char delimiter = ',';
};

enum class RejectReason { invalid_date, missing_geography, missing_event_id, failed_inclusion, duplicate };

const char* to_string(RejectReason reason);

struct RejectionReport {
    std::size_t rows_read = 0;
    std::map<RejectReason, std::size_t> counts;

    std::size_t total() const;
    std::size_t count(RejectReason r) const;
};

struct ParsedIncidents {
    std::vector<IncidentRecord> records;
    RejectionReport report;
};

/// Parses delimited incident rows. Duplicate event ids keep the first row.
/// Throws ParseError for a malformed header, a row with the wrong field count,
/// or non-numeric text in a numeric column; throws DataError on empty input.
ParsedIncidents parse_incidents(std::istream& in, const ColumnMap& schema = {});

/// Clamps values above the nearest-rank `upper_quantile` of `values`.
std::vector<double> winsorize(std::span<const double> values, double upper_quantile);

enum class Grain { region, country };

const char* to_string(Grain grain);
std::optional<Grain> parse_grain(std::string_view text);

/// Weekly per-geography panel on a shared week axis.
struct PanelSeries {
    Grain grain = Grain::region;
    std::vector<long> geo_ids;
    std::vector<WeekId> week_axis;
    /// [geo][week]
    std::vector<std::vector<long>> counts;
    std::vector<std::vector<double>> casualties_total;
    std::vector<std::vector<double>> killed;
    std::vector<std::vector<double>> wounded;

    std::size_t n_geographies() const { return geo_ids.size(); }
    std::size_t n_weeks() const { return week_axis.size(); }

    /// Throws DataError when a shape or ordering invariant is broken.
    void validate() const;

    bool operator==(const PanelSeries&) const = default;
};

struct AggregateOptions {
    /// Geographies to emit (in order). Default: regions 1..12 at region grain,
    /// the observed countries at country grain.
    std::optional<std::vector<long>> geographies;
    /// Axis bounds; default is min..max event week.
    std::optional<Date> first_week;
    std::optional<Date> last_week;
    double winsor_quantile = 0.99;
};

struct AggregateReport {
    std::size_t records_in_gap_weeks = 0;
    std::size_t gap_weeks_removed = 0;
    std::size_t records_outside_axis = 0;
    std::size_t records_unknown_geography = 0;
};

/// Counts incidents per geography and ISO week. Casualty panels are summed the
/// same way and then winsorized (pooled over all cells, field by field).
PanelSeries aggregate_weekly(std::span<const IncidentRecord> records, Grain grain,
                             const AggregateOptions& options = {}, AggregateReport* report = nullptr);

/// Contiguous run of Mondays from `first` to `last` inclusive, gap year removed.
std::vector<WeekId> build_week_axis(Date first, Date last);

// Serialization. CSV columns: geo_id, iso_monday, count, casualties_total,
// killed, wounded; the grain travels in a leading "# grain=" comment line.
void write_panel_csv(std::ostream& out, const PanelSeries& panel);
PanelSeries read_panel_csv(std::istream& in);
std::string panel_to_json(const PanelSeries& panel);
PanelSeries panel_from_json(std::string_view text);

/// Writes rows in the default ingest schema, suitable for parse_incidents.
void write_incidents_csv(std::ostream& out, std::span<const IncidentRecord> records);

}  // namespace burstcast
