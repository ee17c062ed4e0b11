#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "revcast/data/panel.hpp"
#include "revcast/dlm/filter.hpp"
#include "revcast/dlm/sampling.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/aggregate.hpp"
#include "revcast/multiscale/netprice.hpp"
#include "revcast/multiscale/settings.hpp"
#include "revcast/random.hpp"

namespace revcast::multiscale {

/// The four compared model families.
enum class Variant { baseline, ms, net, ms_net };

inline constexpr Variant kAllVariants[] = {Variant::baseline, Variant::ms, Variant::net, Variant::ms_net};

inline std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::baseline: return "BASELINE";
        case Variant::ms: return "MS";
        case Variant::net: return "NET";
        case Variant::ms_net: return "MS_NET";
    }
    return "?";
}

inline Variant parse_variant(std::string_view s) {
    for (auto v : kAllVariants)
        if (to_string(v) == s) return v;
    throw ConfigError("unknown variant '" + std::string(s) + "' (expected BASELINE, MS, NET or MS_NET)");
}

inline bool uses_multiscale(Variant v) { return v == Variant::ms || v == Variant::ms_net; }
inline bool uses_net_price(Variant v) { return v == Variant::net || v == Variant::ms_net; }

/// Another Category's discount used as an extra predictor, e.g. one
/// category's TPR% in a different category's revenue model.
struct CrossPredictor {
    std::string target_category;
    std::string source_category;
    std::string covariate = "tpr_pct";

    std::string name() const { return "x_" + source_category + "_" + covariate; }
};

/// Everything a pair-level revenue model reads.
struct PairContext {
    const Series* series = nullptr;
    std::vector<std::string> discounts;
    const EffectTrajectory* effects = nullptr;
    const NetPriceModel* price = nullptr;
    dlm::CovariateTable extra;       // rows aligned with the series' weeks
    std::vector<int> missing_weeks;  // outcomes treated as missing when filtering
};

/// Builds the extra-covariate table for cross-Category predictors of a pair.
inline dlm::CovariateTable cross_predictor_table(const Panel& panel, const Series& series,
                                                 const std::vector<CrossPredictor>& cross) {
    dlm::CovariateTable out(static_cast<std::size_t>(series.n_weeks()));
    for (const auto& c : cross) {
        if (c.target_category != series.key.category_id) continue;
        const auto& src = panel.at({series.key.lsg_id, c.source_category});
        std::vector<double> col(static_cast<std::size_t>(series.n_weeks()));
        for (int w = series.first_week; w <= series.last_week(); ++w) {
            if (!src.covers(w))
                throw AlignmentError("cross predictor " + c.name() + " does not cover week " + std::to_string(w));
            col[series.index(w)] = src.discount(c.covariate)[src.index(w)];
        }
        out.set(c.name(), std::move(col));
    }
    return out;
}

/// One LSG-Category revenue model of a given variant, filtered over the
/// series and able to forecast from any filtered week.
class PairModel {
public:
    PairModel(PairContext ctx, Variant variant, const ModelSettings& settings)
        : ctx_(std::move(ctx)), variant_(variant), settings_(settings) {
        if (!ctx_.series) throw ConfigError("pair model needs a series");
        const auto& s = *ctx_.series;
        if (uses_multiscale(variant_) && !ctx_.effects)
            throw ConfigError("variant " + std::string(to_string(variant_)) + " for " + s.key.label() +
                              " requires an effect trajectory");
        if (uses_net_price(variant_) && !ctx_.price)
            throw ConfigError("variant " + std::string(to_string(variant_)) + " for " + s.key.label() +
                              " requires a fitted price model");

        const auto n = static_cast<std::size_t>(s.n_weeks());
        dlm::CovariateTable history(n);
        std::vector<std::string> regressors;
        if (uses_multiscale(variant_)) {
            dlm::CovariateTable local(n);
            for (const auto& d : ctx_.effects->names) local.set(d, s.discount(d));
            // The week-w regressor uses the aggregate posterior through w-1,
            // matching what a forecast made at w-1 would use.
            auto ms = build_multiscale_regressors(local, s.first_week, *ctx_.effects, 1);
            for (const auto& [name, col] : ms.raw()) {
                history.set(name, col);
                regressors.push_back(name);
            }
        } else {
            for (const auto& d : ctx_.discounts) {
                history.set(d, s.discount(d));
                regressors.push_back(d);
            }
        }
        if (uses_net_price(variant_)) {
            std::vector<double> lp(n);
            for (std::size_t i = 0; i < n; ++i) lp[i] = std::log(s.net_price[i]);
            history.set(kLogNetPrice, std::move(lp));
            regressors.emplace_back(kLogNetPrice);
        }
        for (const auto& [name, col] : ctx_.extra.raw()) {
            history.set(name, col);
            regressors.push_back(name);
        }

        structure_ = revenue_structure(settings_, regressors);
        design_ = structure_.design(history);

        y_.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            if (s.revenue[i]) y_[i] = std::log(*s.revenue[i]);
        for (int w : ctx_.missing_weeks)
            if (s.covers(w)) y_[s.index(w)].reset();

        dlm::PriorSpec prior = settings_.prior;
        if (uses_multiscale(variant_))
            for (const auto& d : ctx_.effects->names) prior.coefficient_means.emplace_back(multiscale_name(d), settings_.multiscale_prior_mean);
        initial_ = dlm::default_prior(structure_, y_, prior);
        initial_.t = s.first_week - 1;
    }

    Variant variant() const { return variant_; }
    const Series& series() const { return *ctx_.series; }
    const dlm::ModelStructure& structure() const { return structure_; }
    const Eigen::MatrixXd& design() const { return design_; }
    const dlm::StatePosterior& initial_prior() const { return initial_; }
    const dlm::FilterResult& result() const { return result_; }
    int first_week() const { return ctx_.series->first_week; }
    int last_week() const { return ctx_.series->last_week(); }
    int filtered_through() const { return first_week() + static_cast<int>(result_.posteriors.size()) - 1; }

    /// Filters from the first week through `through_week` (default: all).
    void run(std::optional<int> through_week = std::nullopt) {
        const int last = through_week.value_or(last_week());
        const auto rows = static_cast<Eigen::Index>(std::min(last, last_week()) - first_week() + 1);
        if (rows < 1) throw ParameterError("nothing to filter before week " + std::to_string(last));
        result_ = dlm::filter_design(structure_, design_.topRows(rows), std::span(y_).first(static_cast<std::size_t>(rows)),
                                     initial_);
    }

    const dlm::StatePosterior& posterior_at(int week) const {
        if (week < first_week() || week > filtered_through())
            throw AlignmentError("pair model " + series().key.label() + " has no posterior for week " + std::to_string(week));
        return result_.posteriors[static_cast<std::size_t>(week - first_week())];
    }

    /// Resolved F rows for weeks origin+1 .. origin+k. Discounts are known
    /// controls; multi-scale effects are frozen at the origin; Net Price is
    /// the price model's plug-in forecast (log of the predictive median).
    Eigen::MatrixXd future_design(int origin, int k) const {
        const auto& s = series();
        if (origin + k > s.last_week())
            throw AlignmentError("covariates for " + s.key.label() + " end at week " + std::to_string(s.last_week()) +
                                 "; cannot forecast " + std::to_string(k) + " weeks from " + std::to_string(origin));
        Eigen::VectorXd frozen;
        if (uses_multiscale(variant_)) frozen = ctx_.effects->mean_at(origin);
        std::vector<double> price_path;
        if (uses_net_price(variant_))
            for (const auto& f : ctx_.price->forecast(origin, k)) price_path.push_back(f.location);

        Eigen::MatrixXd out(k, structure_.total_dimension);
        for (int j = 1; j <= k; ++j) {
            const auto i = s.index(origin + j);
            out.row(j - 1) = structure_
                                 .resolve_f([&](const std::string& name) -> double {
                                     if (name == kLogNetPrice) return price_path[static_cast<std::size_t>(j - 1)];
                                     if (name.starts_with("ms_")) {
                                         const auto d = name.substr(3);
                                         return s.discount(d)[i] * frozen(ctx_.effects->index_of(d));
                                     }
                                     if (ctx_.extra.contains(name)) return ctx_.extra.column(name)[i];
                                     return s.discount(name)[i];
                                 })
                                 .transpose();
        }
        return out;
    }

    std::vector<dlm::ForecastDistribution> forecast(int origin, int k) const {
        return dlm::forecast_ahead(posterior_at(origin), structure_, future_design(origin, k), k);
    }

    /// Same forecast with an explicit log Net Price path in place of the
    /// plug-in (what-if or Monte Carlo price paths).
    std::vector<dlm::ForecastDistribution> forecast_with_price(int origin, int k, std::span<const double> log_price) const {
        Eigen::MatrixXd fd = future_design(origin, k);
        const int idx = structure_.index_of(kLogNetPrice);
        if (idx < 0) throw ConfigError("variant has no Net Price regressor");
        for (int j = 0; j < k; ++j) fd(j, idx) = log_price[static_cast<std::size_t>(j)];
        return dlm::forecast_ahead(posterior_at(origin), structure_, fd, k);
    }

    /// Log-revenue forecast samples per horizon that integrate over effect and
    /// price uncertainty instead of plugging in point values: each draw
    /// substitutes one coefficient draw and one log price path, then samples
    /// the conditional predictive once.
    std::vector<std::vector<double>> pooled_samples(int origin, int k, int draws, std::uint64_t seed) const {
        if (draws < 1) throw ParameterError("pooled draw count must be >= 1");
        const auto& s = series();
        const Eigen::MatrixXd base = future_design(origin, k);
        const auto& post = posterior_at(origin);

        std::vector<Eigen::VectorXd> theta;
        std::vector<int> ms_cols;
        if (uses_multiscale(variant_)) {
            const auto& e = *ctx_.effects;
            for (const auto& d : e.names) ms_cols.push_back(structure_.index_of(multiscale_name(d)));
            if (origin < e.first_week) {
                theta.assign(1, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(e.names.size())));
            } else if (!e.draws.empty()) {
                theta = e.draws[static_cast<std::size_t>(origin - e.first_week)];
            } else {
                const auto w = static_cast<std::size_t>(origin - e.first_week);
                dlm::StatePosterior sub{origin, e.means[w], e.covariances[w], e.dof[w], 1.0};
                theta = dlm::sample_states(sub, draws, mix_seed(seed, 1));
            }
        }
        std::vector<dlm::ForecastDistribution> price;
        int price_col = -1;
        if (uses_net_price(variant_)) {
            price = ctx_.price->forecast(origin, k);
            price_col = structure_.index_of(kLogNetPrice);
        }

        Rng rng(mix_seed(seed, 2));
        std::vector<std::vector<double>> out(static_cast<std::size_t>(k));
        for (auto& v : out) v.reserve(static_cast<std::size_t>(draws));
        for (int i = 0; i < draws; ++i) {
            Eigen::MatrixXd fd = base;
            for (int j = 0; j < k; ++j) {
                const auto row = s.index(origin + j + 1);
                if (!theta.empty()) {
                    const auto& th = theta[static_cast<std::size_t>(i) % theta.size()];
                    for (std::size_t c = 0; c < ms_cols.size(); ++c)
                        fd(j, ms_cols[c]) = s.discount(ctx_.effects->names[c])[row] * th(static_cast<Eigen::Index>(c));
                }
                if (price_col >= 0) {
                    const auto& p = price[static_cast<std::size_t>(j)];
                    fd(j, price_col) = p.location + p.sd() * StudentTSampler(p.dof)(rng);
                }
            }
            const auto fc = dlm::forecast_ahead(post, structure_, fd, k);
            for (int j = 0; j < k; ++j) {
                const auto& f = fc[static_cast<std::size_t>(j)];
                out[static_cast<std::size_t>(j)].push_back(f.location + f.sd() * StudentTSampler(f.dof)(rng));
            }
        }
        return out;
    }

    /// MAPE (percent) of 1-step median forecasts over observed weeks in
    /// [from_week, to_week] of the current filter run.
    double one_step_mape(int from_week, int to_week) const {
        double sum = 0.0;
        int count = 0;
        for (int w = std::max(from_week, first_week()); w <= std::min(to_week, filtered_through()); ++w) {
            const auto i = static_cast<std::size_t>(w - first_week());
            const auto& actual = series().revenue[i];
            if (!actual || !y_[i]) continue;
            const double point = result_.one_step[i].median();
            sum += 100.0 * std::abs(*actual - point) / *actual;
            ++count;
        }
        if (count == 0) throw EmptyEvaluationError("no observed weeks to score");
        return sum / count;
    }

private:
    PairContext ctx_;
    Variant variant_;
    ModelSettings settings_;
    dlm::ModelStructure structure_;
    Eigen::MatrixXd design_;
    std::vector<dlm::Observation> y_;
    dlm::StatePosterior initial_;
    dlm::FilterResult result_;
};

/// Single-origin convenience wrapper: fit the pair's model through `origin`
/// and forecast k weeks ahead.
inline std::vector<dlm::ForecastDistribution> forecast_pair(const SeriesKey& key, Variant variant, int origin, int k,
                                                            const Panel& panel, const ModelSettings& settings,
                                                            const EffectTrajectory* effects = nullptr,
                                                            const NetPriceModel* price = nullptr) {
    PairContext ctx;
    ctx.series = &panel.at(key);
    ctx.discounts = panel.active_discounts(key.category_id);
    ctx.effects = effects;
    ctx.price = price;
    PairModel model(std::move(ctx), variant, settings);
    model.run(origin);
    return model.forecast(origin, k);
}

struct TunedDiscounts {
    double delta_regression = 0.99;
    double beta = 0.99;
    double mape = 0.0;
};

/// Grid search over (delta_regression, beta) minimising 1-step MAPE of the
/// median point over weeks [first + 8, end_week]. Ties keep the earlier grid
/// point.
inline TunedDiscounts tune_discounts(const PairContext& ctx, Variant variant, const ModelSettings& base,
                                     const std::vector<double>& delta_grid, const std::vector<double>& beta_grid,
                                     int end_week) {
    TunedDiscounts best{base.delta_regression, base.beta, std::numeric_limits<double>::infinity()};
    for (double d : delta_grid) {
        for (double b : beta_grid) {
            ModelSettings s = base;
            s.delta_regression = d;
            s.beta = b;
            PairModel m(ctx, variant, s);
            m.run(end_week);
            double score;
            try {
                score = m.one_step_mape(m.first_week() + 8, end_week);
            } catch (const EmptyEvaluationError&) {
                continue;
            }
            if (score < best.mape) best = {d, b, score};
        }
    }
    return best;
}

}  // namespace revcast::multiscale
