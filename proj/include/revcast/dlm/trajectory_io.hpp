#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "revcast/csv.hpp"
#include "revcast/dlm/posterior.hpp"

namespace revcast::dlm {

/// Audit layout: week, m_0..m_{d-1}, C_i_j for i <= j (row-major upper
/// triangle), n, s.
inline void write_trajectory(std::ostream& out, const std::vector<StatePosterior>& posteriors) {
    if (posteriors.empty()) return;
    const int d = posteriors.front().dimension();
    std::vector<std::string> header{"week"};
    for (int i = 0; i < d; ++i) header.push_back("m_" + std::to_string(i));
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) header.push_back("C_" + std::to_string(i) + "_" + std::to_string(j));
    header.push_back("n");
    header.push_back("s");
    csv::write_row(out, header);

    std::vector<std::string> row;
    for (const auto& p : posteriors) {
        row.clear();
        row.push_back(std::to_string(p.t));
        for (int i = 0; i < d; ++i) row.push_back(csv::format_double(p.m(i)));
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) row.push_back(csv::format_double(p.c(i, j)));
        row.push_back(csv::format_double(p.n));
        row.push_back(csv::format_double(p.s));
        csv::write_row(out, row);
    }
}

inline std::vector<StatePosterior> read_trajectory(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) return {};
    const auto header = csv::split(line);
    // header = 1 + d + d(d+1)/2 + 2
    const auto width = static_cast<int>(header.size());
    int d = 0;
    while (1 + d + d * (d + 1) / 2 + 2 < width) ++d;
    if (1 + d + d * (d + 1) / 2 + 2 != width || header.front() != "week")
        throw SchemaError("trajectory header has an unexpected width", reader.line_no());

    std::vector<StatePosterior> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (static_cast<int>(f.size()) != width)
            throw SchemaError("line " + std::to_string(reader.line_no()) + ": wrong field count", reader.line_no());
        StatePosterior p;
        p.t = static_cast<int>(csv::parse_int(f[0], reader.line_no(), "week"));
        p.m.resize(d);
        p.c.resize(d, d);
        int k = 1;
        for (int i = 0; i < d; ++i) p.m(i) = csv::parse_double(f[static_cast<std::size_t>(k++)], reader.line_no(), "m");
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                p.c(i, j) = csv::parse_double(f[static_cast<std::size_t>(k++)], reader.line_no(), "C");
                p.c(j, i) = p.c(i, j);
            }
        p.n = csv::parse_double(f[static_cast<std::size_t>(k++)], reader.line_no(), "n");
        p.s = csv::parse_double(f[static_cast<std::size_t>(k++)], reader.line_no(), "s");
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace revcast::dlm
