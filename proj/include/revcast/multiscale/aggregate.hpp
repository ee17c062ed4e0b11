#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revcast/data/panel.hpp"
#include "revcast/dlm/covariates.hpp"
#include "revcast/dlm/filter.hpp"
#include "revcast/dlm/sampling.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/settings.hpp"
#include "revcast/random.hpp"

namespace revcast::multiscale {

/// Cross-LSG aggregate for one Category: summed revenue, mean discounts.
struct AggregateSeries {
    std::string category_id;
    int first_week = 0;
    std::vector<std::optional<double>> revenue;
    dlm::CovariateTable discounts;

    int n_weeks() const { return static_cast<int>(revenue.size()); }
};

inline AggregateSeries aggregate_category(const Panel& panel, const std::string& category_id) {
    std::vector<const Series*> members;
    for (const auto& s : panel.series())
        if (s.key.category_id == category_id) members.push_back(&s);
    if (members.empty()) throw LookupError("category '" + category_id + "' is not in the panel");

    int w0 = members.front()->first_week;
    int w1 = members.front()->last_week();
    for (const auto* s : members) {
        w0 = std::min(w0, s->first_week);
        w1 = std::max(w1, s->last_week());
    }

    AggregateSeries out;
    out.category_id = category_id;
    out.first_week = w0;
    const auto n = static_cast<std::size_t>(w1 - w0 + 1);
    out.revenue.assign(n, std::nullopt);
    const auto names = panel.active_discounts(category_id);
    std::vector<std::vector<double>> x(names.size(), std::vector<double>(n, 0.0));

    for (int w = w0; w <= w1; ++w) {
        const auto i = static_cast<std::size_t>(w - w0);
        double total = 0.0;
        bool any_revenue = false;
        int covering = 0;
        for (const auto* s : members) {
            if (!s->covers(w)) continue;
            ++covering;
            const auto si = s->index(w);
            if (s->revenue[si]) {
                total += *s->revenue[si];
                any_revenue = true;
            }
            for (std::size_t k = 0; k < names.size(); ++k) x[k][i] += s->discount(names[k])[si];
        }
        if (covering == 0) throw LookupError("no LSG of category '" + category_id + "' covers week " + std::to_string(w));
        for (auto& col : x) col[i] /= static_cast<double>(covering);
        if (any_revenue) out.revenue[i] = total;
    }
    out.discounts = dlm::CovariateTable(n);
    for (std::size_t k = 0; k < names.size(); ++k) out.discounts.set(names[k], std::move(x[k]));
    return out;
}

/// Per-week posterior summaries of an aggregate model's discount coefficients.
struct EffectTrajectory {
    std::string category_id;
    int first_week = 0;
    std::vector<std::string> names;
    std::vector<Eigen::VectorXd> means;        // one per week
    std::vector<Eigen::MatrixXd> covariances;  // coefficient block of C
    std::vector<double> dof;
    /// Optional per-week coefficient draws.
    std::vector<std::vector<Eigen::VectorXd>> draws;

    int n_weeks() const { return static_cast<int>(means.size()); }
    int last_week() const { return first_week + n_weeks() - 1; }
    bool covers(int week) const { return week >= first_week && week <= last_week(); }

    /// Posterior mean at `week`; zero (the prior mean) before the first week.
    Eigen::VectorXd mean_at(int week) const {
        if (week < first_week) return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
        if (week > last_week())
            throw AlignmentError("effects for category '" + category_id + "' end at week " +
                                 std::to_string(last_week()) + ", week " + std::to_string(week) + " requested");
        return means[static_cast<std::size_t>(week - first_week)];
    }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }
};

struct AggregateFit {
    dlm::ModelStructure structure;
    dlm::FilterResult filter;
    EffectTrajectory effects;
};

inline std::vector<dlm::Observation> log_observations(const std::vector<std::optional<double>>& revenue) {
    std::vector<dlm::Observation> y(revenue.size());
    for (std::size_t i = 0; i < revenue.size(); ++i)
        if (revenue[i]) y[i] = std::log(*revenue[i]);
    return y;
}

/// Filters log aggregate revenue with trend + harmonic + discount regression
/// and records the coefficient posterior each week. `missing_weeks` are
/// treated as missing observations.
inline AggregateFit fit_aggregate_model(const AggregateSeries& agg, const ModelSettings& settings,
                                        int draws_per_week = 0, std::uint64_t seed = 0,
                                        const std::vector<int>& missing_weeks = {}) {
    if (agg.revenue.empty()) throw LookupError("aggregate series for '" + agg.category_id + "' is empty");
    const auto names = agg.discounts.names();
    AggregateFit fit;
    fit.structure = revenue_structure(settings, names);
    auto y = log_observations(agg.revenue);
    for (int w : missing_weeks)
        if (w >= agg.first_week && w < agg.first_week + agg.n_weeks()) y[static_cast<std::size_t>(w - agg.first_week)].reset();
    auto prior = dlm::default_prior(fit.structure, y, settings.prior);
    prior.t = agg.first_week - 1;
    fit.filter = dlm::filter_series(fit.structure, agg.discounts, y, prior);

    auto& e = fit.effects;
    e.category_id = agg.category_id;
    e.first_week = agg.first_week;
    e.names = names;
    std::vector<int> idx;
    for (const auto& n : names) idx.push_back(fit.structure.index_of(n));
    const auto k = static_cast<Eigen::Index>(idx.size());
    for (std::size_t t = 0; t < fit.filter.posteriors.size(); ++t) {
        const auto& p = fit.filter.posteriors[t];
        Eigen::VectorXd m(k);
        Eigen::MatrixXd c(k, k);
        for (Eigen::Index i = 0; i < k; ++i) {
            m(i) = p.m(idx[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < k; ++j) c(i, j) = p.c(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        }
        e.means.push_back(m);
        e.covariances.push_back(c);
        e.dof.push_back(p.n);
        if (draws_per_week > 0 && k > 0) {
            dlm::StatePosterior sub{p.t, m, c, p.n, p.s};
            e.draws.push_back(dlm::sample_states(sub, draws_per_week, mix_seed(seed, hash_string(agg.category_id), t)));
        }
    }
    return fit;
}

inline EffectTrajectory fit_aggregate(const AggregateSeries& agg, const ModelSettings& settings, int draws_per_week = 0,
                                      std::uint64_t seed = 0) {
    return fit_aggregate_model(agg, settings, draws_per_week, seed).effects;
}

/// Discount regression effect: inner product of covariates and coefficients,
/// matched by name.
inline double regression_effect(const std::map<std::string, double>& x, const std::map<std::string, double>& theta) {
    if (x.size() != theta.size()) throw NameMismatchError("covariate and coefficient name sets differ");
    double sum = 0.0;
    for (const auto& [name, value] : x) {
        auto it = theta.find(name);
        if (it == theta.end()) throw NameMismatchError("no coefficient named '" + name + "'");
        sum += value * it->second;
    }
    return sum;
}

inline std::string multiscale_name(const std::string& discount) { return "ms_" + discount; }

/// Element-wise products X_{w,z} * m_{w - lag, c} for each discount the
/// effects carry. `local` rows start at `local_first_week`. Weeks before the
/// aggregate fit use the zero prior mean; weeks after it are an error.
inline dlm::CovariateTable build_multiscale_regressors(const dlm::CovariateTable& local, int local_first_week,
                                                       const EffectTrajectory& effects, int lag = 0) {
    dlm::CovariateTable out(local.rows());
    for (std::size_t k = 0; k < effects.names.size(); ++k) {
        const auto& x = local.column(effects.names[k]);
        std::vector<double> col(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            const int source_week = local_first_week + static_cast<int>(i) - lag;
            if (source_week > effects.last_week())
                throw AlignmentError("multiscale regressor for week " + std::to_string(local_first_week + static_cast<int>(i)) +
                                     " needs effects beyond week " + std::to_string(effects.last_week()));
            const double m = source_week < effects.first_week
                                 ? 0.0
                                 : effects.means[static_cast<std::size_t>(source_week - effects.first_week)](static_cast<Eigen::Index>(k));
            col[i] = x[i] * m;
        }
        out.set(multiscale_name(effects.names[k]), std::move(col));
    }
    return out;
}

}  // namespace revcast::multiscale
