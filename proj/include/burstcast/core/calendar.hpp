#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace burstcast {

using Date = std::chrono::year_month_day;

/// A Monday-aligned ISO week. `ordinal` counts weeks from the Monday
/// 1970-01-05, so it is negative for earlier weeks and strictly increasing
/// with `monday`.
struct WeekId {
    Date monday;
    long ordinal = 0;

    auto operator<=>(const WeekId& other) const { return ordinal <=> other.ordinal; }
    bool operator==(const WeekId& other) const { return ordinal == other.ordinal; }
};

/// Builds a date, or nullopt when the triple is not a real calendar day.
/// Month or day 0 (the "unknown" convention in incident catalogs) is invalid.
std::optional<Date> make_date(int year, int month, int day);

/// Monday beginning the ISO week that contains `date`.
WeekId iso_week(Date date);

/// The week whose Monday is `ordinal` weeks after 1970-01-05.
WeekId week_from_ordinal(long ordinal);

/// ISO-8601 week number (1..53) of the week containing `date`.
int iso_week_number(Date date);

/// 1-based day of year.
int day_of_year(Date date);

std::string to_iso_string(Date date);

/// Parses YYYY-MM-DD; nullopt on malformed text or invalid dates.
std::optional<Date> parse_iso_date(std::string_view text);

/// Weeks whose Monday falls in this year are excluded from every panel
/// (the source catalog lost its 1993 records).
inline constexpr int kGapYear = 1993;

inline bool in_gap_year(const WeekId& w) { return static_cast<int>(w.monday.year()) == kGapYear; }

}  // namespace burstcast
