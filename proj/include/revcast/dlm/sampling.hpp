#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "revcast/dlm/posterior.hpp"
#include "revcast/error.hpp"
#include "revcast/random.hpp"

namespace revcast::dlm {

/// Draws from the multivariate Student-t T_n(m, C) implied by a posterior.
/// Uses a symmetric square root of C so singular (even zero) C is allowed.
inline std::vector<Eigen::VectorXd> sample_states(const StatePosterior& posterior, int count, std::uint64_t seed) {
    if (count < 1) throw ParameterError("sample count must be >= 1");
    const auto d = posterior.m.size();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(posterior.c);
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd factor = es.eigenvectors() * root.asDiagonal();

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi(posterior.n);

    std::vector<Eigen::VectorXd> draws;
    draws.reserve(static_cast<std::size_t>(count));
    Eigen::VectorXd z(d);
    for (int i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) z(j) = gauss(rng);
        const double w = std::sqrt(posterior.n / chi(rng));
        draws.emplace_back(posterior.m + factor * z * w);
    }
    return draws;
}

}  // namespace revcast::dlm
