#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "revcast/data/panel.hpp"
#include "revcast/dlm/filter.hpp"
#include "revcast/error.hpp"
#include "revcast/multiscale/settings.hpp"

namespace revcast::multiscale {

inline constexpr const char* kLogBasePrice = "log_base_price";
inline constexpr const char* kLogNetPrice = "log_net_price";

/// Log Net Price on trend + regression(discounts, log base price). No
/// seasonal block.
class NetPriceModel {
public:
    NetPriceModel(const Series& series, const std::vector<std::string>& discounts, const ModelSettings& settings)
        : key_(series.key), first_week_(series.first_week) {
        const auto n = static_cast<std::size_t>(series.n_weeks());
        std::vector<dlm::Observation> y(n);
        std::vector<double> log_base(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!(series.net_price[i] > 0.0) || !(series.base_price[i] > 0.0))
                throw DataError("non-positive price in " + series.key.label() + " at week " +
                                std::to_string(series.first_week + static_cast<int>(i)));
            y[i] = std::log(series.net_price[i]);
            log_base[i] = std::log(series.base_price[i]);
        }
        covariates_ = dlm::CovariateTable(n);
        std::vector<std::string> regressors;
        for (const auto& d : discounts) {
            covariates_.set(d, series.discount(d));
            regressors.push_back(d);
        }
        covariates_.set(kLogBasePrice, std::move(log_base));
        regressors.emplace_back(kLogBasePrice);

        structure_ = revenue_structure(settings, regressors, /*seasonal=*/false);
        design_ = structure_.design(covariates_);
        auto prior = dlm::default_prior(structure_, y, settings.prior);
        prior.t = first_week_ - 1;
        filter_ = dlm::filter_design(structure_, design_, y, prior);
    }

    const SeriesKey& key() const { return key_; }
    int first_week() const { return first_week_; }
    int last_week() const { return first_week_ + static_cast<int>(design_.rows()) - 1; }
    const dlm::ModelStructure& structure() const { return structure_; }
    const dlm::FilterResult& filter() const { return filter_; }

    const dlm::StatePosterior& posterior_at(int week) const {
        if (week < first_week_ || week > last_week())
            throw AlignmentError("price model has no posterior for week " + std::to_string(week));
        return filter_.posteriors[static_cast<std::size_t>(week - first_week_)];
    }

    /// Log-space k-step predictives from `origin`; future discounts and base
    /// prices come from the series itself (known controls).
    std::vector<dlm::ForecastDistribution> forecast(int origin, int k) const {
        if (origin + k > last_week())
            throw AlignmentError("price model covariates end at week " + std::to_string(last_week()));
        const auto future = design_.middleRows(origin + 1 - first_week_, k);
        return dlm::forecast_ahead(posterior_at(origin), structure_, Eigen::MatrixXd(future), k);
    }

    std::vector<dlm::ForecastDistribution> forecast(int origin, const dlm::CovariateTable& future, int k) const {
        return dlm::forecast_ahead(posterior_at(origin), structure_, future, k);
    }

    /// Plug-in price path: predictive medians exp(location), horizons 1..k.
    std::vector<double> median_path(int origin, int k) const {
        std::vector<double> out;
        for (const auto& f : forecast(origin, k)) out.push_back(f.median());
        return out;
    }

private:
    SeriesKey key_;
    int first_week_;
    dlm::CovariateTable covariates_;
    dlm::ModelStructure structure_;
    Eigen::MatrixXd design_;
    dlm::FilterResult filter_;
};

inline NetPriceModel fit_netprice(const Series& series, const std::vector<std::string>& discounts,
                                  const ModelSettings& settings) {
    return NetPriceModel(series, discounts, settings);
}

}  // namespace revcast::multiscale
