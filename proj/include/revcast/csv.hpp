#pragma once

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "revcast/error.hpp"

namespace revcast::csv {

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline std::optional<double> try_parse_double(std::string_view s) {
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    auto res = std::from_chars(first, s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline double parse_double(std::string_view s, std::size_t line, std::string_view field) {
    auto v = try_parse_double(s);
    if (!v) throw SchemaError("line " + std::to_string(line) + ": field '" + std::string(field) +
                                  "' is not a number: '" + std::string(s) + "'",
                              line);
    return *v;
}

inline long long parse_int(std::string_view s, std::size_t line, std::string_view field) {
    long long v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw SchemaError("line " + std::to_string(line) + ": field '" + std::string(field) +
                              "' is not an integer: '" + std::string(s) + "'",
                          line);
    return v;
}

/// Splits one line on commas. Fields never contain commas or quotes in the
/// formats this library writes.
inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

/// Line reader that strips a trailing '\r' and tracks 1-based line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        out << fields[i];
    }
    out << '\n';
}

}  // namespace revcast::csv
