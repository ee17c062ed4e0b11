#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "revcast/error.hpp"
#include "revcast/eval/metrics.hpp"

namespace revcast::eval {

struct ComparisonRow {
    SeriesKey key;
    int horizon = 0;
    double mape_a = 0.0;
    double mape_b = 0.0;

    double delta() const { return mape_b - mape_a; }
    bool improved() const { return mape_b < mape_a; }
};

struct Comparison {
    std::vector<ComparisonRow> rows;  // scatter-ready (a, b) pairs
    double fraction_improved = 0.0;
};

/// Pairs records of two models by (key, horizon). `masked` compares the
/// holiday-masked MAPE instead. Ties are not improvements.
inline Comparison compare_models(const std::vector<AccuracyRecord>& a, const std::vector<AccuracyRecord>& b,
                                 bool masked = false) {
    auto index = [](const std::vector<AccuracyRecord>& v) {
        std::map<std::pair<SeriesKey, int>, const AccuracyRecord*> m;
        for (const auto& r : v)
            if (!m.emplace(std::pair{r.key, r.horizon}, &r).second)
                throw KeyMismatchError("duplicate key " + r.key.label() + " at horizon " + std::to_string(r.horizon));
        return m;
    };
    const auto ia = index(a);
    const auto ib = index(b);
    if (ia.size() != ib.size()) throw KeyMismatchError("record sets have different sizes");
    Comparison out;
    std::size_t improved = 0;
    for (const auto& [k, ra] : ia) {
        auto it = ib.find(k);
        if (it == ib.end()) throw KeyMismatchError("key " + k.first.label() + " missing from the second record set");
        ComparisonRow row{k.first, k.second, masked ? ra->masked_mape : ra->mape, masked ? it->second->masked_mape : it->second->mape};
        if (row.improved()) ++improved;
        out.rows.push_back(row);
    }
    if (!out.rows.empty()) out.fraction_improved = static_cast<double>(improved) / static_cast<double>(out.rows.size());
    return out;
}

}  // namespace revcast::eval
