#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "revcast/error.hpp"

namespace revcast::dlm {

/// Named columns of per-week covariate values, all of one length.
class CovariateTable {
public:
    CovariateTable() = default;
    explicit CovariateTable(std::size_t rows) : rows_(rows) {}

    std::size_t rows() const { return rows_; }
    std::size_t columns() const { return columns_.size(); }
    bool empty() const { return columns_.empty(); }

    /// Adds or replaces a column.
    void set(const std::string& name, std::vector<double> values) {
        if (columns_.empty() && rows_ == 0) rows_ = values.size();
        if (values.size() != rows_)
            throw DimensionError("column '" + name + "' has " + std::to_string(values.size()) +
                                 " rows, table has " + std::to_string(rows_));
        for (auto& [n, v] : columns_) {
            if (n == name) {
                v = std::move(values);
                return;
            }
        }
        columns_.emplace_back(name, std::move(values));
    }

    bool contains(const std::string& name) const { return find(name) != nullptr; }

    const std::vector<double>& column(const std::string& name) const {
        if (const auto* c = find(name)) return *c;
        throw ResolutionError("covariate '" + name + "' is not in the table");
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(columns_.size());
        for (const auto& [n, v] : columns_) out.push_back(n);
        return out;
    }

    /// Rows [first, first + count) of every column.
    CovariateTable slice(std::size_t first, std::size_t count) const {
        if (first + count > rows_) throw DimensionError("covariate slice out of range");
        CovariateTable out(count);
        for (const auto& [n, v] : columns_)
            out.columns_.emplace_back(n, std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                                             v.begin() + static_cast<std::ptrdiff_t>(first + count)));
        return out;
    }

    void remove(const std::string& name) {
        std::erase_if(columns_, [&](const auto& c) { return c.first == name; });
    }

    const auto& raw() const { return columns_; }

private:
    const std::vector<double>* find(const std::string& name) const {
        for (const auto& [n, v] : columns_)
            if (n == name) return &v;
        return nullptr;
    }

    std::size_t rows_ = 0;
    std::vector<std::pair<std::string, std::vector<double>>> columns_;
};

}  // namespace revcast::dlm
