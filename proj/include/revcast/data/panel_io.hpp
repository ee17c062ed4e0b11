#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "revcast/csv.hpp"
#include "revcast/data/panel.hpp"
#include "revcast/error.hpp"

namespace revcast {

inline constexpr std::string_view kPanelHeader =
    "week,lsg_id,category_id,revenue,tpr_pct,adfront_pct,dspback_pct,net_price,base_price";

namespace detail {

struct PanelRow {
    int week = 0;
    std::optional<double> revenue;
    double tpr = 0, adfront = 0, dspback = 0, net = 0, base = 0;
    std::size_t line = 0;
};

inline void check_row(const PanelRow& r, std::size_t line) {
    auto fail = [&](const std::string& what) {
        throw InvariantError("line " + std::to_string(line) + ": " + what, line);
    };
    if (r.week < 0) fail("week index must be >= 0");
    if (r.revenue && !(*r.revenue > 0.0 && std::isfinite(*r.revenue))) fail("revenue must be positive (use an empty field for MISSING)");
    for (double p : {r.tpr, r.adfront, r.dspback})
        if (!(p >= 0.0 && p <= 100.0)) fail("discount percentages must lie in [0, 100]");
    if (!(r.net > 0.0 && std::isfinite(r.net))) fail("net_price must be positive");
    if (!(r.base > 0.0 && std::isfinite(r.base))) fail("base_price must be positive");
    if (r.net > r.base + 1e-9) fail("net_price exceeds base_price");
}

}  // namespace detail

/// Reads and validates a panel CSV. Errors carry the offending line number.
inline Panel read_panel(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw SchemaError("empty panel file", 0);
    if (line != kPanelHeader)
        throw SchemaError("line 1: header must be '" + std::string(kPanelHeader) + "'", 1);

    std::map<SeriesKey, std::map<int, detail::PanelRow>> rows;
    while (reader.next(line)) {
        const auto n = reader.line_no();
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 9)
            throw SchemaError("line " + std::to_string(n) + ": expected 9 fields, got " + std::to_string(f.size()), n);
        detail::PanelRow r;
        r.line = n;
        r.week = static_cast<int>(csv::parse_int(f[0], n, "week"));
        SeriesKey key{std::string(f[1]), std::string(f[2])};
        if (key.lsg_id.empty() || key.category_id.empty())
            throw SchemaError("line " + std::to_string(n) + ": lsg_id and category_id must be nonempty", n);
        if (!f[3].empty()) r.revenue = csv::parse_double(f[3], n, "revenue");
        r.tpr = csv::parse_double(f[4], n, "tpr_pct");
        r.adfront = csv::parse_double(f[5], n, "adfront_pct");
        r.dspback = csv::parse_double(f[6], n, "dspback_pct");
        r.net = csv::parse_double(f[7], n, "net_price");
        r.base = csv::parse_double(f[8], n, "base_price");
        detail::check_row(r, n);
        auto [it, inserted] = rows[key].emplace(r.week, r);
        if (!inserted)
            throw DuplicateKeyError("line " + std::to_string(n) + ": duplicate key (week " + std::to_string(r.week) +
                                        ", " + key.label() + ") first seen on line " + std::to_string(it->second.line),
                                    n);
    }

    Panel panel;
    for (auto& [key, weeks] : rows) {
        Series s;
        s.key = key;
        s.first_week = weeks.begin()->first;
        const int expected = weeks.rbegin()->first - s.first_week + 1;
        if (static_cast<int>(weeks.size()) != expected) {
            int prev = s.first_week - 1;
            for (const auto& [w, r] : weeks) {
                if (w != prev + 1)
                    throw InvariantError("line " + std::to_string(r.line) + ": series " + key.label() +
                                             " skips from week " + std::to_string(prev) + " to " + std::to_string(w) +
                                             " (gaps must be explicit MISSING rows)",
                                         r.line);
                prev = w;
            }
        }
        s.resize(weeks.size());
        std::size_t i = 0;
        for (const auto& [w, r] : weeks) {
            s.revenue[i] = r.revenue;
            s.tpr_pct[i] = r.tpr;
            s.adfront_pct[i] = r.adfront;
            s.dspback_pct[i] = r.dspback;
            s.net_price[i] = r.net;
            s.base_price[i] = r.base;
            ++i;
        }
        panel.add(std::move(s));
    }
    return panel;
}

inline Panel parse_panel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open panel file '" + path + "'", 0);
    return read_panel(in);
}

/// Writes rows ordered by (week, lsg, category).
inline void write_panel(std::ostream& out, const Panel& panel) {
    out << kPanelHeader << '\n';
    const int w0 = panel.first_week();
    const int w1 = panel.last_week();
    std::vector<std::string> row(9);
    for (int w = w0; w <= w1; ++w) {
        for (const auto& s : panel.series()) {
            if (!s.covers(w)) continue;
            const auto i = s.index(w);
            row[0] = std::to_string(w);
            row[1] = s.key.lsg_id;
            row[2] = s.key.category_id;
            row[3] = csv::format_optional(s.revenue[i]);
            row[4] = csv::format_double(s.tpr_pct[i]);
            row[5] = csv::format_double(s.adfront_pct[i]);
            row[6] = csv::format_double(s.dspback_pct[i]);
            row[7] = csv::format_double(s.net_price[i]);
            row[8] = csv::format_double(s.base_price[i]);
            csv::write_row(out, row);
        }
    }
}

inline void write_panel(const std::string& path, const Panel& panel) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_panel(out, panel);
}

}  // namespace revcast
