#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "revcast/data/panel.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/study.hpp"

namespace revcast::eval {

using multiscale::ForecastRecord;
using multiscale::Variant;

/// Mean absolute percentage error over unmasked positions (true = dropped).
inline double mape(std::span<const double> points, std::span<const double> actuals, const std::vector<bool>& mask = {}) {
    if (points.size() != actuals.size()) throw DimensionError("points and actuals differ in length");
    if (!mask.empty() && mask.size() != actuals.size()) throw DimensionError("mask length differs from actuals");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (!mask.empty() && mask[i]) continue;
        if (!(actuals[i] > 0.0)) throw DataError("non-positive actual at position " + std::to_string(i));
        sum += 100.0 * std::abs(actuals[i] - points[i]) / actuals[i];
        ++n;
    }
    if (n == 0) throw EmptyEvaluationError("every position is masked");
    return sum / static_cast<double>(n);
}

/// Fraction of actuals inside [lo, hi].
inline double coverage(std::span<const double> lo, std::span<const double> hi, std::span<const double> actuals) {
    if (lo.size() != hi.size() || lo.size() != actuals.size()) throw DimensionError("interval and actual lengths differ");
    if (actuals.empty()) throw EmptyEvaluationError("no intervals to score");
    std::size_t inside = 0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (lo[i] > hi[i]) throw ParameterError("interval with lo > hi at position " + std::to_string(i));
        if (actuals[i] >= lo[i] && actuals[i] <= hi[i]) ++inside;
    }
    return static_cast<double>(inside) / static_cast<double>(actuals.size());
}

struct AccuracyRecord {
    SeriesKey key;
    Variant variant = Variant::baseline;
    int horizon = 12;
    double mape = 0.0;
    /// NaN when every evaluated week is a holiday.
    double masked_mape = std::numeric_limits<double>::quiet_NaN();
    double coverage90 = 0.0;
    int n_evaluated = 0;
};

enum class PointRule { mape_optimal, median };

inline double point_of(const ForecastRecord& r, PointRule rule) {
    if (rule == PointRule::mape_optimal && std::isfinite(r.point_mape_opt)) return r.point_mape_opt;
    return r.point_median;
}

/// Per (pair, variant, horizon) accuracy over records with observed actuals.
/// Holiday masking drops records whose target week is listed.
inline std::vector<AccuracyRecord> compute_accuracy(const std::vector<ForecastRecord>& records,
                                                    const std::vector<int>& holiday_weeks = {},
                                                    PointRule rule = PointRule::mape_optimal,
                                                    const std::vector<int>& horizons = {}) {
    const std::set<int> holidays(holiday_weeks.begin(), holiday_weeks.end());
    const std::set<int> keep(horizons.begin(), horizons.end());
    struct Acc {
        std::vector<double> points, actuals, lo, hi;
        std::vector<bool> mask;
    };
    std::map<std::tuple<SeriesKey, int, int>, Acc> groups;
    for (const auto& r : records) {
        if (!r.actual) continue;
        if (!keep.empty() && !keep.contains(r.horizon)) continue;
        auto& a = groups[{r.key, static_cast<int>(r.variant), r.horizon}];
        a.points.push_back(point_of(r, rule));
        a.actuals.push_back(*r.actual);
        a.lo.push_back(r.lo90);
        a.hi.push_back(r.hi90);
        a.mask.push_back(holidays.contains(r.target_week()));
    }
    std::vector<AccuracyRecord> out;
    out.reserve(groups.size());
    for (const auto& [k, a] : groups) {
        AccuracyRecord rec;
        rec.key = std::get<0>(k);
        rec.variant = static_cast<Variant>(std::get<1>(k));
        rec.horizon = std::get<2>(k);
        rec.mape = mape(a.points, a.actuals);
        if (std::find(a.mask.begin(), a.mask.end(), false) != a.mask.end())
            rec.masked_mape = mape(a.points, a.actuals, a.mask);
        rec.coverage90 = coverage(a.lo, a.hi, a.actuals);
        rec.n_evaluated = static_cast<int>(a.actuals.size());
        out.push_back(rec);
    }
    return out;
}

inline std::vector<AccuracyRecord> select(const std::vector<AccuracyRecord>& all, Variant v, int horizon) {
    std::vector<AccuracyRecord> out;
    for (const auto& r : all)
        if (r.variant == v && r.horizon == horizon) out.push_back(r);
    return out;
}

}  // namespace revcast::eval
