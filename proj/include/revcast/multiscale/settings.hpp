#pragma once

#include <string>
#include <vector>

#include "revcast/dlm/component.hpp"
#include "revcast/dlm/filter.hpp"
#include "revcast/dlm/structure.hpp"
#include "revcast/error.hpp"

namespace revcast::multiscale {

/// Discount factors and prior options shared by every model in the hierarchy.
struct ModelSettings {
    double delta_trend = 0.98;
    double delta_harmonic = 0.98;
    double delta_regression = 0.99;
    double beta = 0.99;
    int period = 52;
    dlm::PriorSpec prior;
    /// Prior mean of multi-scale coefficients: 1 means "inherit the aggregate
    /// effect unchanged".
    double multiscale_prior_mean = 1.0;
};

/// trend + optional harmonic + optional regression over `regressors`.
inline dlm::ModelStructure revenue_structure(const ModelSettings& s, const std::vector<std::string>& regressors,
                                             bool seasonal = true) {
    std::vector<dlm::ComponentBlock> blocks{dlm::make_trend(s.delta_trend)};
    if (seasonal) blocks.push_back(dlm::make_harmonic(s.period, s.delta_harmonic));
    if (!regressors.empty()) blocks.push_back(dlm::make_regression(regressors, s.delta_regression));
    return dlm::superpose(std::move(blocks), s.beta);
}

}  // namespace revcast::multiscale
