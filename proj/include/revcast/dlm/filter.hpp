#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "revcast/dlm/covariates.hpp"
#include "revcast/dlm/posterior.hpp"
#include "revcast/dlm/structure.hpp"
#include "revcast/error.hpp"

namespace revcast::dlm {

/// Outcome for one week; std::nullopt is a missing observation.
using Observation = std::optional<double>;

namespace detail {

inline void symmetrize(Eigen::MatrixXd& m) { m = 0.5 * (m + m.transpose()).eval(); }

/// G C G' with each diagonal block inflated by 1/delta. Off-diagonal blocks
/// are left as G C G' so the induced W is block-diagonal.
inline Eigen::MatrixXd discount_evolve(const Eigen::MatrixXd& c, const ModelStructure& s) {
    Eigen::MatrixXd r = s.g * c * s.g.transpose();
    symmetrize(r);
    for (std::size_t b = 0; b < s.blocks.size(); ++b) {
        const int o = s.block_offset[b];
        const int d = s.blocks[b].dimension;
        if (s.blocks[b].delta != 1.0) r.block(o, o, d, d) /= s.blocks[b].delta;
    }
    return r;
}

inline void check_dimension(const Eigen::VectorXd& f, const StatePosterior& p) {
    if (f.size() != p.m.size())
        throw DimensionError("F has length " + std::to_string(f.size()) + ", state has dimension " +
                             std::to_string(p.m.size()));
}

}  // namespace detail

/// Posterior at t to prior at t+1.
inline StatePosterior evolve(const StatePosterior& posterior, const ModelStructure& structure) {
    if (posterior.m.size() != structure.total_dimension)
        throw DimensionError("posterior dimension does not match structure");
    StatePosterior prior;
    prior.t = posterior.t + 1;
    prior.m = structure.g * posterior.m;
    prior.c = detail::discount_evolve(posterior.c, structure);
    prior.n = structure.variance_discount * posterior.n;
    prior.s = posterior.s;
    return prior;
}

/// One-step predictive from a prior (output of evolve).
inline ForecastDistribution step_forecast(const StatePosterior& prior, const Eigen::VectorXd& f) {
    detail::check_dimension(f, prior);
    ForecastDistribution out;
    out.origin_t = prior.t - 1;
    out.horizon_k = 1;
    out.location = f.dot(prior.m);
    out.scale = f.dot(prior.c * f) + prior.s;
    out.dof = prior.n;
    return out;
}

/// Conjugate update with variance learning. A missing observation returns
/// the prior unchanged.
inline StatePosterior update(const StatePosterior& prior, const Eigen::VectorXd& f, Observation y) {
    if (!y) return prior;
    if (!std::isfinite(*y)) throw DataError("observation at week " + std::to_string(prior.t) + " is not finite");
    detail::check_dimension(f, prior);

    const Eigen::VectorXd rf = prior.c * f;
    const double q = f.dot(rf) + prior.s;
    const double e = *y - f.dot(prior.m);
    const Eigen::VectorXd a = rf / q;

    StatePosterior post;
    post.t = prior.t;
    post.n = prior.n + 1.0;
    post.s = prior.s + (prior.s / post.n) * (e * e / q - 1.0);
    post.m = prior.m + a * e;
    post.c = (post.s / prior.s) * (prior.c - a * a.transpose() * q);
    detail::symmetrize(post.c);
    return post;
}

struct FilterResult {
    std::vector<StatePosterior> posteriors;      // after each week
    std::vector<ForecastDistribution> one_step;  // made before each week
    std::vector<std::optional<double>> std_errors;
};

/// Sequential evolve -> forecast -> update over a pre-resolved design.
inline FilterResult filter_design(const ModelStructure& structure, const Eigen::MatrixXd& design,
                                  std::span<const Observation> y, const StatePosterior& initial) {
    if (static_cast<std::size_t>(design.rows()) != y.size())
        throw DimensionError("design has " + std::to_string(design.rows()) + " rows but " + std::to_string(y.size()) +
                             " observations were supplied");
    FilterResult out;
    out.posteriors.reserve(y.size());
    out.one_step.reserve(y.size());
    out.std_errors.reserve(y.size());

    StatePosterior state = initial;
    for (std::size_t t = 0; t < y.size(); ++t) {
        const Eigen::VectorXd f = design.row(static_cast<Eigen::Index>(t)).transpose();
        StatePosterior prior = evolve(state, structure);
        const ForecastDistribution fc = step_forecast(prior, f);
        out.one_step.push_back(fc);
        out.std_errors.push_back(y[t] ? std::optional<double>((*y[t] - fc.location) / fc.sd()) : std::nullopt);
        state = update(prior, f, y[t]);
        out.posteriors.push_back(state);
    }
    return out;
}

inline FilterResult filter_series(const ModelStructure& structure, const CovariateTable& covariates,
                                  std::span<const Observation> y, const StatePosterior& initial) {
    if (!covariates.empty() && covariates.rows() != y.size())
        throw DimensionError("covariate table and observations cover different week ranges");
    CovariateTable table = covariates;
    if (table.empty()) table = CovariateTable(y.size());
    return filter_design(structure, structure.design(table), y, initial);
}

/// Marginal k-step predictives from a posterior. Row j of `future_design`
/// is the resolved F for horizon j+1.
inline std::vector<ForecastDistribution> forecast_ahead(const StatePosterior& state, const ModelStructure& structure,
                                                        const Eigen::MatrixXd& future_design, int k) {
    if (k < 1) throw ParameterError("forecast horizon must be >= 1, got " + std::to_string(k));
    if (future_design.rows() < k) throw DimensionError("future covariates cover fewer than k weeks");
    if (future_design.cols() != structure.total_dimension) throw DimensionError("future design has wrong width");

    std::vector<ForecastDistribution> out;
    out.reserve(static_cast<std::size_t>(k));
    StatePosterior cur = evolve(state, structure);
    for (int j = 1; j <= k; ++j) {
        if (j > 1) {
            cur.m = structure.g * cur.m;
            cur.c = detail::discount_evolve(cur.c, structure);
        }
        const Eigen::VectorXd f = future_design.row(j - 1).transpose();
        ForecastDistribution fc;
        fc.origin_t = state.t;
        fc.horizon_k = j;
        fc.location = f.dot(cur.m);
        fc.scale = f.dot(cur.c * f) + cur.s;
        fc.dof = cur.n;
        out.push_back(fc);
    }
    return out;
}

inline std::vector<ForecastDistribution> forecast_ahead(const StatePosterior& state, const ModelStructure& structure,
                                                        const CovariateTable& future_covariates, int k) {
    if (k < 1) throw ParameterError("forecast horizon must be >= 1, got " + std::to_string(k));
    CovariateTable table = future_covariates;
    if (table.empty()) table = CovariateTable(static_cast<std::size_t>(k));
    return forecast_ahead(state, structure, structure.design(table), k);
}

/// Options for the data-anchored initial prior.
struct PriorSpec {
    double c0 = 1.0;
    double n0 = 5.0;
    int level_window = 4;
    int variance_window = 8;
    double s_floor = 1e-4;
    /// Nonzero prior means for named regression coefficients.
    std::vector<std::pair<std::string, double>> coefficient_means;
};

/// m0 = 0 except the trend entry (mean of the first few observed values),
/// C0 = c0 * I, s0 = sample variance of the first observed values.
inline StatePosterior default_prior(const ModelStructure& structure, std::span<const Observation> y,
                                    const PriorSpec& spec = {}) {
    std::vector<double> observed;
    for (const auto& v : y) {
        if (v) observed.push_back(*v);
        if (static_cast<int>(observed.size()) >= std::max(spec.level_window, spec.variance_window)) break;
    }

    StatePosterior p;
    p.t = -1;
    p.m = Eigen::VectorXd::Zero(structure.total_dimension);
    p.c = spec.c0 * Eigen::MatrixXd::Identity(structure.total_dimension, structure.total_dimension);
    p.n = spec.n0;

    if (const int ti = structure.trend_index(); ti >= 0 && !observed.empty()) {
        const std::size_t k = std::min<std::size_t>(observed.size(), static_cast<std::size_t>(spec.level_window));
        double sum = 0.0;
        for (std::size_t i = 0; i < k; ++i) sum += observed[i];
        p.m(ti) = sum / static_cast<double>(k);
    }
    for (const auto& [name, mean] : spec.coefficient_means)
        if (const int idx = structure.index_of(name); idx >= 0) p.m(idx) = mean;

    const std::size_t nv = std::min<std::size_t>(observed.size(), static_cast<std::size_t>(spec.variance_window));
    if (nv >= 2) {
        double mean = 0.0;
        for (std::size_t i = 0; i < nv; ++i) mean += observed[i];
        mean /= static_cast<double>(nv);
        double ss = 0.0;
        for (std::size_t i = 0; i < nv; ++i) ss += (observed[i] - mean) * (observed[i] - mean);
        p.s = std::max(ss / static_cast<double>(nv - 1), spec.s_floor);
    } else {
        p.s = 1.0;
    }
    return p;
}

}  // namespace revcast::dlm
