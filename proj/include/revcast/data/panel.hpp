#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revcast/error.hpp"

namespace revcast {

/// (LSG, Category) pair.
struct SeriesKey {
    std::string lsg_id;
    std::string category_id;

    auto operator<=>(const SeriesKey&) const = default;
    bool operator==(const SeriesKey&) const = default;

    std::string label() const { return lsg_id + "/" + category_id; }
};

/// Discount covariate column names, in canonical order.
inline constexpr std::array<std::string_view, 3> kDiscountNames{"tpr_pct", "adfront_pct", "dspback_pct"};

/// One contiguous weekly series for a (LSG, Category) pair.
struct Series {
    SeriesKey key;
    int first_week = 0;
    std::vector<std::optional<double>> revenue;  // nullopt = MISSING
    std::vector<double> tpr_pct;
    std::vector<double> adfront_pct;
    std::vector<double> dspback_pct;
    std::vector<double> net_price;
    std::vector<double> base_price;

    int n_weeks() const { return static_cast<int>(revenue.size()); }
    int last_week() const { return first_week + n_weeks() - 1; }
    bool covers(int week) const { return week >= first_week && week <= last_week(); }
    std::size_t index(int week) const { return static_cast<std::size_t>(week - first_week); }

    const std::vector<double>& discount(std::string_view name) const {
        if (name == kDiscountNames[0]) return tpr_pct;
        if (name == kDiscountNames[1]) return adfront_pct;
        if (name == kDiscountNames[2]) return dspback_pct;
        throw LookupError("unknown discount covariate '" + std::string(name) + "'");
    }
    std::vector<double>& discount(std::string_view name) {
        return const_cast<std::vector<double>&>(std::as_const(*this).discount(name));
    }

    void resize(std::size_t n) {
        revenue.resize(n);
        tpr_pct.resize(n);
        adfront_pct.resize(n);
        dspback_pct.resize(n);
        net_price.resize(n);
        base_price.resize(n);
    }
};

/// One preprocessing decision, kept so the pass is not repeated.
struct PreprocessAction {
    enum class Kind { dropped, jittered };
    Kind kind = Kind::dropped;
    std::string category_id;
    std::string lsg_id;  // empty for category-wide drops
    std::string covariate;
    double statistic = 0.0;  // max (drop) or within-series sd (jitter)

    bool operator==(const PreprocessAction&) const = default;
};

struct PreprocessReport {
    double negligible_threshold = 0.0;
    double jitter_trigger = 0.0;
    double jitter_sd = 0.0;
    std::uint64_t seed = 0;
    std::vector<PreprocessAction> actions;

    bool operator==(const PreprocessReport&) const = default;
};

/// Rectangular weekly dataset keyed by (week, LSG, Category). Series are kept
/// sorted by key.
class Panel {
public:
    Panel() = default;

    void add(Series s) {
        if (s.key.lsg_id.empty() || s.key.category_id.empty()) throw InvariantError("series key must be nonempty", 0);
        auto it = std::lower_bound(series_.begin(), series_.end(), s.key,
                                   [](const Series& a, const SeriesKey& k) { return a.key < k; });
        if (it != series_.end() && it->key == s.key) throw DuplicateKeyError("duplicate series " + s.key.label(), 0);
        series_.insert(it, std::move(s));
    }

    const std::vector<Series>& series() const { return series_; }
    std::vector<Series>& series() { return series_; }
    std::size_t size() const { return series_.size(); }

    const Series* find(const SeriesKey& key) const {
        auto it = std::lower_bound(series_.begin(), series_.end(), key,
                                   [](const Series& a, const SeriesKey& k) { return a.key < k; });
        return (it != series_.end() && it->key == key) ? &*it : nullptr;
    }
    const Series& at(const SeriesKey& key) const {
        if (const auto* s = find(key)) return *s;
        throw LookupError("no series " + key.label());
    }

    std::vector<std::string> categories() const {
        std::set<std::string> c;
        for (const auto& s : series_) c.insert(s.key.category_id);
        return {c.begin(), c.end()};
    }
    std::vector<std::string> lsgs() const {
        std::set<std::string> c;
        for (const auto& s : series_) c.insert(s.key.lsg_id);
        return {c.begin(), c.end()};
    }
    std::vector<SeriesKey> keys() const {
        std::vector<SeriesKey> k;
        for (const auto& s : series_) k.push_back(s.key);
        return k;
    }

    int first_week() const {
        int w = series_.empty() ? 0 : series_.front().first_week;
        for (const auto& s : series_) w = std::min(w, s.first_week);
        return w;
    }
    int last_week() const {
        int w = -1;
        for (const auto& s : series_) w = std::max(w, s.last_week());
        return w;
    }
    int n_weeks() const { return series_.empty() ? 0 : last_week() - first_week() + 1; }

    /// Discount covariates excluded from models of a category.
    const std::set<std::string>& excluded(const std::string& category) const {
        static const std::set<std::string> none;
        auto it = excluded_.find(category);
        return it == excluded_.end() ? none : it->second;
    }
    void exclude(const std::string& category, const std::string& covariate) { excluded_[category].insert(covariate); }

    /// Discount names a category's models use, canonical order.
    std::vector<std::string> active_discounts(const std::string& category) const {
        std::vector<std::string> out;
        const auto& ex = excluded(category);
        for (auto n : kDiscountNames)
            if (!ex.contains(std::string(n))) out.emplace_back(n);
        return out;
    }

    const std::optional<PreprocessReport>& preprocessing() const { return preprocessing_; }
    void set_preprocessing(PreprocessReport r) { preprocessing_ = std::move(r); }

private:
    std::vector<Series> series_;
    std::map<std::string, std::set<std::string>> excluded_;
    std::optional<PreprocessReport> preprocessing_;
};

}  // namespace revcast
