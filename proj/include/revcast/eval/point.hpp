#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "revcast/dlm/posterior.hpp"
#include "revcast/error.hpp"
#include "revcast/random.hpp"

namespace revcast::eval {

/// Weighted median: sort ascending and return the first value whose
/// cumulative normalized weight reaches 0.5.
inline double weighted_median(std::vector<std::pair<double, double>> value_weight) {
    if (value_weight.empty()) throw ParameterError("weighted median of an empty sample");
    std::sort(value_weight.begin(), value_weight.end());
    double total = 0.0;
    for (const auto& [v, w] : value_weight) total += w;
    double cum = 0.0;
    for (const auto& [v, w] : value_weight) {
        cum += w;
        if (cum >= 0.5 * total) return v;
    }
    return value_weight.back().first;
}

/// Minimizer of expected absolute percentage error for the revenue-space
/// predictive exp(T): the 1/y-weighted median of Monte Carlo draws.
inline double point_mape_optimal(const dlm::ForecastDistribution& dist, int mc_samples, std::uint64_t seed) {
    if (mc_samples < 1000) throw ParameterError("mc_samples must be >= 1000");
    Rng rng(seed);
    StudentTSampler t(dist.dof);
    const double sd = dist.sd();
    std::vector<double> x(static_cast<std::size_t>(mc_samples));
    for (auto& v : x) v = dist.location + sd * t(rng);
    std::sort(x.begin(), x.end());
    // Weights 1/y = exp(-x), rescaled by exp(x_min) to stay finite.
    const double x0 = x.front();
    std::vector<double> w(x.size());
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) total += (w[i] = std::exp(x0 - x[i]));
    double cum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cum += w[i];
        if (cum >= 0.5 * total) return std::exp(x[i]);
    }
    return std::exp(x.back());
}

}  // namespace revcast::eval
