#include "burstcast/core/calendar.hpp"

#include <charconv>
#include <cstdio>

namespace burstcast {

namespace {

using namespace std::chrono;

constexpr sys_days kEpochMonday{year{1970} / January / 5};

}  // namespace

std::optional<Date> make_date(int y, int m, int d) {
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    const Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

WeekId iso_week(Date date) {
    const sys_days sd{date};
    const weekday wd{sd};
    const sys_days monday = sd - days{wd.iso_encoding() - 1};
    const long offset = (monday - kEpochMonday).count();
    // offset is a multiple of 7; floor division keeps pre-1970 weeks exact.
    const long ordinal = offset >= 0 ? offset / 7 : -((-offset) / 7);
    return WeekId{Date{monday}, ordinal};
}

WeekId week_from_ordinal(long ordinal) {
    const sys_days monday = kEpochMonday + days{ordinal * 7};
    return WeekId{Date{monday}, ordinal};
}

int iso_week_number(Date date) {
    // The ISO year is the year of the Thursday in the same week.
    const sys_days sd{date};
    const weekday wd{sd};
    const sys_days thursday = sd + days{4 - static_cast<int>(wd.iso_encoding())};
    const Date th{thursday};
    const sys_days jan1{th.year() / January / 1};
    return static_cast<int>((thursday - jan1).count() / 7) + 1;
}

int day_of_year(Date date) {
    const sys_days sd{date};
    const sys_days jan1{date.year() / January / 1};
    return static_cast<int>((sd - jan1).count()) + 1;
}

std::string to_iso_string(Date date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

std::optional<Date> parse_iso_date(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0, m = 0, d = 0;
    auto parse = [&](std::size_t pos, std::size_t len, int& out) {
        const auto* first = text.data() + pos;
        auto [ptr, ec] = std::from_chars(first, first + len, out);
        return ec == std::errc{} && ptr == first + len;
    };
    if (!parse(0, 4, y) || !parse(5, 2, m) || !parse(8, 2, d)) return std::nullopt;
    return make_date(y, m, d);
}

}  // namespace burstcast
