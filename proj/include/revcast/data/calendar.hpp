#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "revcast/error.hpp"

namespace revcast {

/// Maps integer week indices to calendar dates: week 0 starts on `start`.
class WeekCalendar {
public:
    explicit WeekCalendar(std::chrono::sys_days start) : start_(start) {}

    std::chrono::sys_days start() const { return start_; }

    /// Week containing `date`; dates before the start give negative weeks.
    int week_of(std::chrono::sys_days date) const {
        const auto days = (date - start_).count();
        return static_cast<int>(days >= 0 ? days / 7 : -((-days + 6) / 7));
    }

    std::chrono::sys_days date_of(int week) const { return start_ + std::chrono::days(7 * week); }

private:
    std::chrono::sys_days start_;
};

/// Parses YYYY-MM-DD.
inline std::chrono::sys_days parse_date(std::string_view s) {
    auto fail = [&] { return ConfigError("invalid date '" + std::string(s) + "' (expected YYYY-MM-DD)"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw fail();
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::string_view part, auto& out) {
        auto r = std::from_chars(part.data(), part.data() + part.size(), out);
        if (r.ec != std::errc() || r.ptr != part.data() + part.size()) throw fail();
    };
    num(s.substr(0, 4), y);
    num(s.substr(5, 2), m);
    num(s.substr(8, 2), d);
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw fail();
    return std::chrono::sys_days{ymd};
}

inline std::string format_date(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
    return buf;
}

inline std::vector<int> weeks_of(const WeekCalendar& cal, const std::vector<std::string>& dates) {
    std::vector<int> out;
    for (const auto& d : dates) out.push_back(cal.week_of(parse_date(d)));
    return out;
}

}  // namespace revcast
