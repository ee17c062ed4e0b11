#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "revcast/csv.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/study.hpp"

namespace revcast::multiscale {

inline constexpr std::string_view kForecastHeader =
    "origin,lsg_id,category_id,variant,horizon,target_week,location,scale,dof,point_mape_opt,point_median,lo90,hi90,"
    "actual,error,std_error";

inline constexpr std::string_view kTuningHeader = "lsg_id,category_id,variant,delta_regression,beta,mape";

inline void write_forecasts(std::ostream& out, const std::vector<ForecastRecord>& records) {
    out << kForecastHeader << '\n';
    for (const auto& r : records) {
        csv::write_row(out, {std::to_string(r.origin), r.key.lsg_id, r.key.category_id, std::string(to_string(r.variant)),
                             std::to_string(r.horizon), std::to_string(r.target_week()), csv::format_double(r.location),
                             csv::format_double(r.scale), csv::format_double(r.dof), csv::format_double(r.point_mape_opt),
                             csv::format_double(r.point_median), csv::format_double(r.lo90), csv::format_double(r.hi90),
                             csv::format_optional(r.actual), csv::format_optional(r.error),
                             csv::format_optional(r.std_error)});
    }
}

inline std::vector<ForecastRecord> read_forecasts(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != kForecastHeader)
        throw SchemaError("line 1: forecast header does not match the documented schema", 1);
    std::vector<ForecastRecord> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto n = reader.line_no();
        const auto f = csv::split(line);
        if (f.size() != 16)
            throw SchemaError("line " + std::to_string(n) + ": expected 16 fields, found " + std::to_string(f.size()), n);
        auto opt = [&](std::string_view s, std::string_view name) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return csv::parse_double(s, n, name);
        };
        ForecastRecord r;
        r.origin = static_cast<int>(csv::parse_int(f[0], n, "origin"));
        r.key = {std::string(f[1]), std::string(f[2])};
        try {
            r.variant = parse_variant(f[3]);
        } catch (const ConfigError& e) {
            throw SchemaError("line " + std::to_string(n) + ": " + e.what(), n);
        }
        r.horizon = static_cast<int>(csv::parse_int(f[4], n, "horizon"));
        if (csv::parse_int(f[5], n, "target_week") != r.origin + r.horizon)
            throw InvariantError("line " + std::to_string(n) + ": target_week != origin + horizon", n);
        r.location = csv::parse_double(f[6], n, "location");
        r.scale = csv::parse_double(f[7], n, "scale");
        r.dof = csv::parse_double(f[8], n, "dof");
        r.point_mape_opt = csv::parse_double(f[9], n, "point_mape_opt");
        r.point_median = csv::parse_double(f[10], n, "point_median");
        r.lo90 = csv::parse_double(f[11], n, "lo90");
        r.hi90 = csv::parse_double(f[12], n, "hi90");
        r.actual = opt(f[13], "actual");
        r.error = opt(f[14], "error");
        r.std_error = opt(f[15], "std_error");
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<ForecastRecord> read_forecasts(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_forecasts(in);
}

inline void write_forecasts(const std::string& path, const std::vector<ForecastRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_forecasts(out, records);
}

inline void write_tuning(std::ostream& out, const std::vector<TuningRecord>& rows) {
    out << kTuningHeader << '\n';
    for (const auto& t : rows)
        csv::write_row(out, {t.key.lsg_id, t.key.category_id, std::string(to_string(t.variant)),
                             csv::format_double(t.delta_regression), csv::format_double(t.beta), csv::format_double(t.mape)});
}

inline std::vector<TuningRecord> read_tuning(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != kTuningHeader) throw SchemaError("line 1: tuning header mismatch", 1);
    std::vector<TuningRecord> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto n = reader.line_no();
        const auto f = csv::split(line);
        if (f.size() != 6) throw SchemaError("line " + std::to_string(n) + ": expected 6 fields", n);
        out.push_back({{std::string(f[0]), std::string(f[1])},
                       parse_variant(f[2]),
                       csv::parse_double(f[3], n, "delta_regression"),
                       csv::parse_double(f[4], n, "beta"),
                       csv::parse_double(f[5], n, "mape")});
    }
    return out;
}

}  // namespace revcast::multiscale
