#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace revcast::dlm {

/// Conjugate normal/inverse-gamma summary of the state after processing
/// weeks up to and including `t`. `c` is the scale matrix of the marginal
/// Student-t for the state (already on the scale of `s`).
struct StatePosterior {
    int t = -1;
    Eigen::VectorXd m;
    Eigen::MatrixXd c;
    double n = 1.0;
    double s = 1.0;

    int dimension() const { return static_cast<int>(m.size()); }

    bool same_moments(const StatePosterior& o) const {
        return m.size() == o.m.size() && (m.array() == o.m.array()).all() && c.rows() == o.c.rows() &&
               (c.array() == o.c.array()).all() && n == o.n && s == o.s;
    }
};

/// Symmetric, and smallest eigenvalue >= -tol * trace.
inline bool is_symmetric_psd(const Eigen::MatrixXd& c, double tol = 1e-10) {
    if (c.size() == 0) return true;
    const double magnitude = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * magnitude) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, Eigen::EigenvaluesOnly);
    const double trace = std::max(c.trace(), 0.0);
    return es.eigenvalues().minCoeff() >= -tol * trace;
}

/// k-step predictive for log revenue: Student-t(location, scale, dof), where
/// `scale` is the squared scale (variance-like) parameter.
struct ForecastDistribution {
    int origin_t = 0;
    int horizon_k = 1;
    double location = 0.0;
    double scale = 1.0;
    double dof = 1.0;

    double sd() const { return std::sqrt(scale); }

    /// Quantile of the log-space predictive.
    double quantile(double p) const {
        double z;
        if (!std::isfinite(dof) || dof > 1e7) {
            z = boost::math::quantile(boost::math::normal_distribution<double>(), p);
        } else {
            z = boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
        }
        return location + z * sd();
    }

    /// Median of the revenue-space predictive, exp(location).
    double median() const { return std::exp(location); }

    /// Central interval in revenue space.
    std::pair<double, double> interval(double level) const {
        const double tail = 0.5 * (1.0 - level);
        return {std::exp(quantile(tail)), std::exp(quantile(1.0 - tail))};
    }
};

}  // namespace revcast::dlm
