#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "revcast/csv.hpp"
#include "revcast/error.hpp"
#include "revcast/eval/compare.hpp"
#include "revcast/eval/crosscat.hpp"
#include "revcast/eval/metrics.hpp"

namespace revcast::eval {

inline constexpr std::string_view kAccuracyHeader =
    "lsg_id,category_id,variant,horizon,mape,masked_mape,coverage90,n_evaluated";
inline constexpr std::string_view kComparisonHeader = "lsg_id,category_id,horizon,mape_a,mape_b";

inline void write_accuracy(std::ostream& out, const std::vector<AccuracyRecord>& rows) {
    out << kAccuracyHeader << '\n';
    for (const auto& r : rows)
        csv::write_row(out, {r.key.lsg_id, r.key.category_id, std::string(multiscale::to_string(r.variant)),
                             std::to_string(r.horizon), csv::format_double(r.mape), csv::format_double(r.masked_mape),
                             csv::format_double(r.coverage90), std::to_string(r.n_evaluated)});
}

inline std::vector<AccuracyRecord> read_accuracy(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != kAccuracyHeader) throw SchemaError("line 1: accuracy header mismatch", 1);
    std::vector<AccuracyRecord> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto n = reader.line_no();
        const auto f = csv::split(line);
        if (f.size() != 8) throw SchemaError("line " + std::to_string(n) + ": expected 8 fields", n);
        AccuracyRecord r;
        r.key = {std::string(f[0]), std::string(f[1])};
        r.variant = multiscale::parse_variant(f[2]);
        r.horizon = static_cast<int>(csv::parse_int(f[3], n, "horizon"));
        r.mape = csv::parse_double(f[4], n, "mape");
        r.masked_mape = csv::parse_double(f[5], n, "masked_mape");
        r.coverage90 = csv::parse_double(f[6], n, "coverage90");
        r.n_evaluated = static_cast<int>(csv::parse_int(f[7], n, "n_evaluated"));
        out.push_back(r);
    }
    return out;
}

inline void write_comparison(std::ostream& out, const Comparison& c) {
    out << kComparisonHeader << '\n';
    for (const auto& r : c.rows)
        csv::write_row(out, {r.key.lsg_id, r.key.category_id, std::to_string(r.horizon), csv::format_double(r.mape_a),
                             csv::format_double(r.mape_b)});
}

inline std::vector<ComparisonRow> read_comparison(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != kComparisonHeader) throw SchemaError("line 1: comparison header mismatch", 1);
    std::vector<ComparisonRow> out;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto n = reader.line_no();
        const auto f = csv::split(line);
        if (f.size() != 5) throw SchemaError("line " + std::to_string(n) + ": expected 5 fields", n);
        out.push_back({{std::string(f[0]), std::string(f[1])},
                       static_cast<int>(csv::parse_int(f[2], n, "horizon")),
                       csv::parse_double(f[3], n, "mape_a"),
                       csv::parse_double(f[4], n, "mape_b")});
    }
    return out;
}

/// Square matrix with a header row and a leading column of category ids.
inline void write_matrix(std::ostream& out, const CrossCatMatrix& m) {
    std::vector<std::string> header{"category"};
    header.insert(header.end(), m.categories.begin(), m.categories.end());
    csv::write_row(out, header);
    for (std::size_t i = 0; i < m.categories.size(); ++i) {
        std::vector<std::string> row{m.categories[i]};
        for (std::size_t j = 0; j < m.categories.size(); ++j)
            row.push_back(csv::format_double(m.entries(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
        csv::write_row(out, row);
    }
}

inline CrossCatMatrix read_matrix(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line)) throw SchemaError("line 1: empty matrix file", 1);
    auto head = csv::split(line);
    if (head.empty() || head[0] != "category") throw SchemaError("line 1: matrix header must start with 'category'", 1);
    CrossCatMatrix m;
    for (std::size_t j = 1; j < head.size(); ++j) m.categories.emplace_back(head[j]);
    const auto c = static_cast<Eigen::Index>(m.categories.size());
    m.entries.resize(c, c);
    Eigen::Index i = 0;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto n = reader.line_no();
        const auto f = csv::split(line);
        if (i >= c || static_cast<Eigen::Index>(f.size()) != c + 1 || f[0] != m.categories[static_cast<std::size_t>(i)])
            throw SchemaError("line " + std::to_string(n) + ": matrix row does not match the header", n);
        for (Eigen::Index j = 0; j < c; ++j) m.entries(i, j) = csv::parse_double(f[static_cast<std::size_t>(j + 1)], n, "entry");
        ++i;
    }
    if (i != c) throw SchemaError("matrix has " + std::to_string(i) + " rows for " + std::to_string(c) + " columns", reader.line_no());
    return m;
}

}  // namespace revcast::eval
