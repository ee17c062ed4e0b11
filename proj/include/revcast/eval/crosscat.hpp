#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revcast/data/panel.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/study.hpp"

namespace revcast::eval {

/// Week-indexed values per series.
using WeeklyValues = std::map<SeriesKey, std::map<int, double>>;

/// Entry (i, j): correlation between Category i's values (errors, or log
/// revenue) and Category j's TPR%. NaN marks cells with no usable LSG.
struct CrossCatMatrix {
    std::vector<std::string> categories;
    Eigen::MatrixXd entries;
    /// Per-LSG matrices behind the mean.
    std::map<std::string, Eigen::MatrixXd> per_lsg;

    int index_of(const std::string& c) const {
        auto it = std::find(categories.begin(), categories.end(), c);
        return it == categories.end() ? -1 : static_cast<int>(it - categories.begin());
    }
    double at(const std::string& row, const std::string& col) const {
        const int i = index_of(row), j = index_of(col);
        if (i < 0 || j < 0) throw LookupError("category not in matrix");
        return entries(i, j);
    }
};

/// Pearson correlation; nullopt with fewer than 3 pairs or a constant side.
inline std::optional<double> pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("pearson inputs differ in length");
    const auto n = x.size();
    if (n < 3) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    const double scale_x = std::max(1.0, std::abs(mx)), scale_y = std::max(1.0, std::abs(my));
    if (sxx <= 1e-24 * scale_x * scale_x * static_cast<double>(n) || syy <= 1e-24 * scale_y * scale_y * static_cast<double>(n))
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Per-LSG Pearson correlation over common weeks, then the unweighted mean
/// over the LSGs where the cell is defined.
inline CrossCatMatrix cross_category_correlation(const WeeklyValues& values, const WeeklyValues& tpr,
                                                 const std::vector<std::string>& categories) {
    std::vector<std::string> lsgs;
    for (const auto& [k, _] : values) lsgs.push_back(k.lsg_id);
    std::sort(lsgs.begin(), lsgs.end());
    lsgs.erase(std::unique(lsgs.begin(), lsgs.end()), lsgs.end());

    const auto c = static_cast<Eigen::Index>(categories.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CrossCatMatrix out;
    out.categories = categories;
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(c, c);
    Eigen::MatrixXi count = Eigen::MatrixXi::Zero(c, c);
    for (const auto& z : lsgs) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Constant(c, c, nan);
        for (Eigen::Index i = 0; i < c; ++i) {
            auto vi = values.find({z, categories[static_cast<std::size_t>(i)]});
            if (vi == values.end()) continue;
            for (Eigen::Index j = 0; j < c; ++j) {
                auto tj = tpr.find({z, categories[static_cast<std::size_t>(j)]});
                if (tj == tpr.end()) continue;
                std::vector<double> x, y;
                for (const auto& [w, v] : vi->second) {
                    auto it = tj->second.find(w);
                    if (it == tj->second.end()) continue;
                    x.push_back(v);
                    y.push_back(it->second);
                }
                if (const auto r = pearson(x, y)) {
                    m(i, j) = *r;
                    sum(i, j) += *r;
                    ++count(i, j);
                }
            }
        }
        out.per_lsg.emplace(z, std::move(m));
    }
    out.entries = Eigen::MatrixXd::Constant(c, c, nan);
    for (Eigen::Index i = 0; i < c; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            if (count(i, j) > 0) out.entries(i, j) = sum(i, j) / count(i, j);
    return out;
}

/// Standardized errors at one horizon and variant, keyed by target week.
inline WeeklyValues standardized_errors(const std::vector<multiscale::ForecastRecord>& records,
                                        multiscale::Variant variant, int horizon) {
    WeeklyValues out;
    for (const auto& r : records)
        if (r.variant == variant && r.horizon == horizon && r.std_error) out[r.key][r.target_week()] = *r.std_error;
    return out;
}

/// A panel column restricted to [from_week, to_week]; missing revenue skipped.
inline WeeklyValues panel_values(const Panel& panel, const std::string& column, int from_week, int to_week) {
    WeeklyValues out;
    for (const auto& s : panel.series()) {
        auto& m = out[s.key];
        for (int w = std::max(from_week, s.first_week); w <= std::min(to_week, s.last_week()); ++w) {
            const auto i = s.index(w);
            if (column == "log_revenue") {
                if (s.revenue[i]) m[w] = std::log(*s.revenue[i]);
            } else {
                m[w] = s.discount(column)[i];
            }
        }
    }
    return out;
}

/// The n Categories with the largest total observed revenue, ordered by id.
inline std::vector<std::string> top_categories_by_revenue(const Panel& panel, int n) {
    std::map<std::string, double> total;
    for (const auto& s : panel.series()) {
        auto& t = total[s.key.category_id];
        for (const auto& r : s.revenue)
            if (r) t += *r;
    }
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [c, t] : total) ranked.emplace_back(-t, c);
    std::sort(ranked.begin(), ranked.end());
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < n; ++i) out.push_back(ranked[i].second);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace revcast::eval
