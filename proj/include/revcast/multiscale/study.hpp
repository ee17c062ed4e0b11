#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "revcast/data/panel.hpp"
#include "revcast/error.hpp"
#include "revcast/eval/point.hpp"
#include "revcast/multiscale/aggregate.hpp"
#include "revcast/multiscale/netprice.hpp"
#include "revcast/multiscale/pair_model.hpp"
#include "revcast/multiscale/settings.hpp"
#include "revcast/parallel.hpp"
#include "revcast/random.hpp"

namespace revcast::multiscale {

struct StudyConfig {
    std::vector<Variant> variants{std::begin(kAllVariants), std::end(kAllVariants)};
    int horizon = 12;
    /// Weeks reserved for burn-in and tuning. Origins run so that horizon-k
    /// targets cover the remaining weeks.
    int burn_in = 52;
    bool tune = true;
    std::vector<double> delta_grid{0.97, 0.98, 0.99, 1.0};
    std::vector<double> beta_grid{0.97, 0.98, 0.99, 1.0};
    ModelSettings settings;
    /// Monte Carlo size for MAPE-optimal points; 0 skips them (NaN).
    int mc_samples = 1000;
    /// When > 0, points and intervals integrate over effect and price draws.
    int pooled_draws = 0;
    std::uint64_t seed = 1;
    std::vector<int> holiday_weeks;
    bool holiday_missing = false;
    std::vector<CrossPredictor> cross_predictors;
    /// Horizons to record; empty means 1..horizon.
    std::vector<int> record_horizons;
    /// Pairs to study; empty means every series in the panel.
    std::vector<SeriesKey> pairs;
    int jobs = 0;

    void validate() const {
        if (variants.empty()) throw ConfigError("variant list is empty");
        if (horizon < 1) throw ConfigError("horizon must be >= 1");
        if (burn_in <= horizon) throw ConfigError("burn_in must exceed the horizon");
        if (tune && (delta_grid.empty() || beta_grid.empty())) throw ConfigError("tuning grid is empty");
        if (mc_samples != 0 && mc_samples < 1000) throw ConfigError("mc_samples must be 0 or >= 1000");
        if (pooled_draws < 0) throw ConfigError("pooled_draws must be >= 0");
        for (int h : record_horizons)
            if (h < 1 || h > horizon) throw ConfigError("recorded horizon " + std::to_string(h) + " outside 1.." + std::to_string(horizon));
    }

    std::vector<int> horizons() const {
        if (!record_horizons.empty()) {
            auto h = record_horizons;
            std::sort(h.begin(), h.end());
            h.erase(std::unique(h.begin(), h.end()), h.end());
            return h;
        }
        std::vector<int> h(static_cast<std::size_t>(horizon));
        for (int i = 0; i < horizon; ++i) h[static_cast<std::size_t>(i)] = i + 1;
        return h;
    }
};

/// One (pair, variant, origin, horizon) forecast. `error` and `std_error`
/// are log-space: log(actual) - location, scaled by sqrt(scale).
struct ForecastRecord {
    SeriesKey key;
    Variant variant = Variant::baseline;
    int origin = 0;
    int horizon = 1;
    double location = 0.0;
    double scale = 1.0;
    double dof = 1.0;
    double point_mape_opt = std::numeric_limits<double>::quiet_NaN();
    double point_median = 0.0;
    double lo90 = 0.0;
    double hi90 = 0.0;
    std::optional<double> actual;
    std::optional<double> error;
    std::optional<double> std_error;

    int target_week() const { return origin + horizon; }
};

struct TuningRecord {
    SeriesKey key;
    Variant variant = Variant::baseline;
    double delta_regression = 0.0;
    double beta = 0.0;
    double mape = 0.0;
};

struct StudyResult {
    int first_origin = 0;
    int last_origin = 0;
    int horizon = 0;
    std::vector<ForecastRecord> records;  // ordered by key, variant, origin, horizon
    std::vector<TuningRecord> tuning;
};

/// First and last forecast origin for a panel of `first..last` weeks.
inline std::pair<int, int> study_origins(int first_week, int last_week, const StudyConfig& cfg) {
    return {first_week + cfg.burn_in - cfg.horizon, last_week - cfg.horizon};
}

namespace detail {

inline double log_quantile_sample(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double pos = p * static_cast<double>(x.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (pos - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

inline double weighted_median_exp(const std::vector<double>& x) {
    std::vector<std::pair<double, double>> vw;
    vw.reserve(x.size());
    const double x0 = *std::min_element(x.begin(), x.end());
    for (double v : x) vw.emplace_back(v, std::exp(x0 - v));
    return std::exp(eval::weighted_median(std::move(vw)));
}

}  // namespace detail

/// Rolling-origin study. Phase A fits one aggregate model per Category
/// (parallel across Categories); phase B fits every pair's variants
/// (parallel across pairs). Filtering is causal, so one pass over the full
/// span yields exactly the posterior a refit through each origin would give.
inline StudyResult run_study(const Panel& panel, const StudyConfig& cfg) {
    cfg.validate();
    if (panel.series().empty()) throw ConfigError("panel is empty");
    const int w0 = panel.first_week();
    const int w1 = panel.last_week();
    if (w1 - w0 + 1 < 2 * cfg.burn_in)
        throw ConfigError("panel spans " + std::to_string(w1 - w0 + 1) + " weeks; the study needs at least " +
                          std::to_string(2 * cfg.burn_in));
    const auto [o0, o1] = study_origins(w0, w1, cfg);

    std::vector<SeriesKey> pairs = cfg.pairs.empty() ? panel.keys() : cfg.pairs;
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& k : pairs) panel.at(k);

    const bool need_effects = std::any_of(cfg.variants.begin(), cfg.variants.end(), uses_multiscale);
    const bool need_price = std::any_of(cfg.variants.begin(), cfg.variants.end(), uses_net_price);
    const std::vector<int> missing = cfg.holiday_missing ? cfg.holiday_weeks : std::vector<int>{};

    // Phase A: Category aggregates.
    std::map<std::string, EffectTrajectory> effects;
    if (need_effects) {
        std::vector<std::string> cats;
        for (const auto& k : pairs) cats.push_back(k.category_id);
        std::sort(cats.begin(), cats.end());
        cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
        std::vector<EffectTrajectory> fitted(cats.size());
        parallel_for(cats.size(), cfg.jobs, [&](std::size_t i) {
            const auto agg = aggregate_category(panel, cats[i]);
            fitted[i] = fit_aggregate_model(agg, cfg.settings, 0, cfg.seed, missing).effects;
        });
        for (std::size_t i = 0; i < cats.size(); ++i) effects.emplace(cats[i], std::move(fitted[i]));
    }

    // Phase B: pair-level variants.
    const auto horizons = cfg.horizons();
    struct PairOutput {
        std::vector<ForecastRecord> records;
        std::vector<TuningRecord> tuning;
    };
    std::vector<PairOutput> outputs(pairs.size());
    parallel_for(pairs.size(), cfg.jobs, [&](std::size_t p) {
        const Series& series = panel.at(pairs[p]);
        if (series.first_week > o0 - 8 || series.last_week() < o1 + cfg.horizon)
            throw ConfigError("series " + series.key.label() + " does not span the study window");
        const auto discounts = panel.active_discounts(series.key.category_id);

        std::unique_ptr<NetPriceModel> price;
        if (need_price) price = std::make_unique<NetPriceModel>(series, discounts, cfg.settings);

        PairContext ctx;
        ctx.series = &series;
        ctx.discounts = discounts;
        if (need_effects) ctx.effects = &effects.at(series.key.category_id);
        ctx.price = price.get();
        ctx.extra = cross_predictor_table(panel, series, cfg.cross_predictors);
        ctx.missing_weeks = missing;

        auto& out = outputs[p];
        out.records.reserve(cfg.variants.size() * static_cast<std::size_t>(o1 - o0 + 1) * horizons.size());
        for (const Variant v : cfg.variants) {
            ModelSettings settings = cfg.settings;
            if (cfg.tune) {
                const auto t = tune_discounts(ctx, v, settings, cfg.delta_grid, cfg.beta_grid, o0);
                settings.delta_regression = t.delta_regression;
                settings.beta = t.beta;
                out.tuning.push_back({series.key, v, t.delta_regression, t.beta, t.mape});
            }
            PairModel model(ctx, v, settings);
            model.run();
            for (int origin = o0; origin <= o1; ++origin) {
                const auto fc = model.forecast(origin, cfg.horizon);
                std::vector<std::vector<double>> pooled;
                if (cfg.pooled_draws > 0)
                    pooled = model.pooled_samples(origin, cfg.horizon, cfg.pooled_draws,
                                                  mix_seed(cfg.seed, hash_string(series.key.lsg_id),
                                                           hash_string(series.key.category_id), static_cast<int>(v), origin));
                for (int h : horizons) {
                    const auto& f = fc[static_cast<std::size_t>(h - 1)];
                    ForecastRecord r;
                    r.key = series.key;
                    r.variant = v;
                    r.origin = origin;
                    r.horizon = h;
                    r.location = f.location;
                    r.scale = f.scale;
                    r.dof = f.dof;
                    if (!pooled.empty()) {
                        const auto& x = pooled[static_cast<std::size_t>(h - 1)];
                        r.point_median = std::exp(detail::log_quantile_sample(x, 0.5));
                        r.point_mape_opt = detail::weighted_median_exp(x);
                        r.lo90 = std::exp(detail::log_quantile_sample(x, 0.05));
                        r.hi90 = std::exp(detail::log_quantile_sample(x, 0.95));
                    } else {
                        r.point_median = f.median();
                        if (cfg.mc_samples > 0)
                            r.point_mape_opt = eval::point_mape_optimal(
                                f, cfg.mc_samples,
                                mix_seed(cfg.seed, hash_string(series.key.lsg_id), hash_string(series.key.category_id),
                                         static_cast<int>(v), origin, h));
                        std::tie(r.lo90, r.hi90) = f.interval(0.90);
                    }
                    r.actual = series.revenue[series.index(r.target_week())];
                    if (r.actual) {
                        r.error = std::log(*r.actual) - f.location;
                        r.std_error = *r.error / f.sd();
                    }
                    out.records.push_back(r);
                }
            }
        }
    });

    StudyResult result;
    result.first_origin = o0;
    result.last_origin = o1;
    result.horizon = cfg.horizon;
    std::size_t total = 0;
    for (const auto& o : outputs) total += o.records.size();
    result.records.reserve(total);
    for (auto& o : outputs) {
        std::move(o.records.begin(), o.records.end(), std::back_inserter(result.records));
        std::move(o.tuning.begin(), o.tuning.end(), std::back_inserter(result.tuning));
    }
    return result;
}

}  // namespace revcast::multiscale
