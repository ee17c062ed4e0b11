#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "revcast/error.hpp"

namespace revcast::dlm {

enum class ComponentKind { trend, harmonic, regression };

inline const char* to_string(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::trend: return "trend";
        case ComponentKind::harmonic: return "harmonic";
        case ComponentKind::regression: return "regression";
    }
    return "?";
}

/// One entry of a block's observation template: either a fixed number or the
/// name of a covariate resolved per week.
struct FTemplateEntry {
    double constant = 0.0;
    std::string covariate;

    bool is_covariate() const { return !covariate.empty(); }

    static FTemplateEntry fixed(double value) { return {value, {}}; }
    static FTemplateEntry named(std::string name) { return {0.0, std::move(name)}; }
};

/// A state-space building block with its own evolution matrix and discount.
struct ComponentBlock {
    ComponentKind kind = ComponentKind::trend;
    int dimension = 1;
    std::vector<FTemplateEntry> f_template;
    Eigen::MatrixXd g_block;
    double delta = 1.0;
    int period = 0;  // harmonic only

    std::vector<std::string> covariate_names() const {
        std::vector<std::string> out;
        for (const auto& e : f_template)
            if (e.is_covariate()) out.push_back(e.covariate);
        return out;
    }
};

struct ComponentParams {
    std::optional<int> period;
    std::vector<std::string> covariate_names;
    double delta = 1.0;
};

namespace detail {

inline void check_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw ParameterError("discount factor must lie in (0, 1], got " + std::to_string(delta));
}

}  // namespace detail

/// Local level: F = [1], G = [1].
inline ComponentBlock make_trend(double delta) {
    detail::check_delta(delta);
    ComponentBlock b;
    b.kind = ComponentKind::trend;
    b.dimension = 1;
    b.f_template = {FTemplateEntry::fixed(1.0)};
    b.g_block = Eigen::MatrixXd::Identity(1, 1);
    b.delta = delta;
    return b;
}

/// Fundamental harmonic of the given period: F = [1, 0] and G the rotation by
/// 2*pi/period.
inline ComponentBlock make_harmonic(int period, double delta) {
    detail::check_delta(delta);
    if (period < 2) throw ParameterError("harmonic period must be >= 2, got " + std::to_string(period));
    const double w = 2.0 * std::numbers::pi / static_cast<double>(period);
    const double c = std::cos(w);
    const double s = std::sin(w);
    ComponentBlock b;
    b.kind = ComponentKind::harmonic;
    b.dimension = 2;
    b.f_template = {FTemplateEntry::fixed(1.0), FTemplateEntry::fixed(0.0)};
    b.g_block.resize(2, 2);
    b.g_block << c, s, -s, c;
    b.delta = delta;
    b.period = period;
    return b;
}

inline ComponentBlock make_regression(std::vector<std::string> names, double delta) {
    detail::check_delta(delta);
    if (names.empty()) throw EmptyRegressionError("regression block needs at least one covariate");
    ComponentBlock b;
    b.kind = ComponentKind::regression;
    b.dimension = static_cast<int>(names.size());
    for (auto& n : names) {
        if (n.empty()) throw EmptyRegressionError("regression covariate names must be nonempty");
        b.f_template.push_back(FTemplateEntry::named(std::move(n)));
    }
    b.g_block = Eigen::MatrixXd::Identity(b.dimension, b.dimension);
    b.delta = delta;
    return b;
}

inline ComponentBlock build_component(ComponentKind kind, const ComponentParams& params) {
    switch (kind) {
        case ComponentKind::trend: return make_trend(params.delta);
        case ComponentKind::harmonic:
            if (!params.period) throw ParameterError("harmonic block requires a period");
            return make_harmonic(*params.period, params.delta);
        case ComponentKind::regression: return make_regression(params.covariate_names, params.delta);
    }
    throw ParameterError("unknown component kind");
}

}  // namespace revcast::dlm
