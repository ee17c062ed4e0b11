#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "revcast/csv.hpp"
#include "revcast/data/panel.hpp"
#include "revcast/error.hpp"
#include "revcast/random.hpp"

namespace revcast {

struct HolidaySpike {
    int week = 0;
    double multiplier = 1.0;
};

/// Category `source`'s TPR% enters category `target`'s log revenue with
/// coefficient `coefficient`, same LSG, same week.
struct CrossEffect {
    int source = 0;
    int target = 0;
    double coefficient = 0.0;
};

struct SynthConfig {
    int n_lsg = 9;
    int n_category = 20;
    int n_weeks = 104;
    std::vector<double> lsg_scales;  // revenue multipliers; default all 1
    std::vector<double> noise_sd;    // per LSG, log scale; default all 0.05
    std::vector<double> category_levels;  // revenue level per category; default drawn

    /// Shared per-category coefficients (TPR, AdFront, DspBack) per percentage
    /// point; default drawn from `effect_ranges`.
    std::vector<std::array<double, 3>> effects;
    std::array<std::array<double, 2>, 3> effect_ranges{{{0.005, 0.015}, {0.005, 0.02}, {0.005, 0.02}}};
    /// Relative amplitude of slow, shared sinusoidal drift in the effects.
    double effect_variation = 0.5;
    double seasonal_amplitude = 0.1;

    std::array<double, 3> discount_max{30.0, 15.0, 10.0};
    double regime_switch_prob = 0.12;
    double zero_regime_prob = 0.3;
    double lsg_discount_perturbation = 1.0;  // sd of persistent per-LSG offsets
    double price_elasticity = 0.0;           // on log(net/base)

    std::vector<HolidaySpike> holidays;
    std::vector<CrossEffect> cross_effects;
    std::uint64_t seed = 1;

    void validate() const {
        if (n_lsg < 1 || n_category < 1 || n_weeks < 1) throw ConfigError("synth sizes must be positive");
        if (!lsg_scales.empty() && static_cast<int>(lsg_scales.size()) != n_lsg)
            throw ConfigError("lsg_scales needs one entry per LSG");
        if (!noise_sd.empty() && static_cast<int>(noise_sd.size()) != n_lsg)
            throw ConfigError("noise_sd needs one entry per LSG");
        if (!category_levels.empty() && static_cast<int>(category_levels.size()) != n_category)
            throw ConfigError("category_levels needs one entry per category");
        if (!effects.empty() && static_cast<int>(effects.size()) != n_category)
            throw ConfigError("effects needs one entry per category");
        for (double v : lsg_scales)
            if (!(v > 0.0)) throw ConfigError("lsg scales must be positive");
        for (double v : noise_sd)
            if (!(v >= 0.0)) throw ConfigError("noise sd must be non-negative");
        for (double v : category_levels)
            if (!(v > 0.0)) throw ConfigError("category levels must be positive");
        for (const auto& h : holidays) {
            if (h.week < 0 || h.week >= n_weeks) throw ConfigError("holiday week out of range");
            if (!(h.multiplier > 0.0)) throw ConfigError("holiday multiplier must be positive");
        }
        for (const auto& c : cross_effects)
            if (c.source < 0 || c.source >= n_category || c.target < 0 || c.target >= n_category)
                throw ConfigError("cross effect references an unknown category");
    }
};

inline std::string synth_lsg_id(int z) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "LSG%02d", z + 1);
    return buf;
}
inline std::string synth_category_id(int c) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "CAT%03d", c + 1);
    return buf;
}

struct CategoryTruth {
    std::string category_id;
    double log_level = 0.0;
    std::vector<double> seasonal;                  // per week
    std::array<std::vector<double>, 3> effects;    // per week, per discount
};

struct GroundTruth {
    int n_weeks = 0;
    std::vector<CategoryTruth> categories;
    std::vector<CrossEffect> cross_effects;
    std::vector<HolidaySpike> holidays;
};

struct SynthOutput {
    Panel panel;
    GroundTruth truth;
};

namespace detail {

/// Piecewise-constant regime path: occasional jumps to a new level, with a
/// share of regimes at zero.
inline std::vector<double> regime_path(Rng& rng, int n, double max_level, double switch_prob, double zero_prob) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto draw_level = [&] { return u(rng) < zero_prob ? 0.0 : max_level * u(rng); };
    std::vector<double> out(static_cast<std::size_t>(n));
    double level = draw_level();
    for (auto& x : out) {
        if (u(rng) < switch_prob) level = draw_level();
        x = level;
    }
    return out;
}

}  // namespace detail

/// Synthetic panel with known ground truth:
///   log revenue = log(scale_z) + log(level_c) + A sin(2 pi t / 52)
///                 + sum_k effect_{c,k}(t) X_{t,c,z,k} + cross terms
///                 + price term + log(holiday multiplier) + N(0, sd_z^2).
inline SynthOutput generate_synthetic(const SynthConfig& config) {
    config.validate();
    const int T = config.n_weeks;
    const auto Tn = static_cast<std::size_t>(T);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    SynthOutput out;
    auto& truth = out.truth;
    truth.n_weeks = T;
    truth.cross_effects = config.cross_effects;
    truth.holidays = config.holidays;

    std::vector<double> holiday_log(Tn, 0.0);
    for (const auto& h : config.holidays) holiday_log[static_cast<std::size_t>(h.week)] += std::log(h.multiplier);

    // Category-level truth and shared discount paths.
    struct CategoryPaths {
        std::array<std::vector<double>, 3> discount;
        std::vector<double> base_price;
        double depth = 0.2;
    };
    std::vector<CategoryPaths> paths(static_cast<std::size_t>(config.n_category));
    for (int c = 0; c < config.n_category; ++c) {
        Rng rng(mix_seed(config.seed, 1, c));
        CategoryTruth ct;
        ct.category_id = synth_category_id(c);
        const double level = config.category_levels.empty() ? std::exp(std::log(2000.0) + u(rng) * std::log(10.0))
                                                            : config.category_levels[static_cast<std::size_t>(c)];
        ct.log_level = std::log(level);
        std::array<double, 3> base{};
        for (int k = 0; k < 3; ++k) {
            const auto& r = config.effect_ranges[static_cast<std::size_t>(k)];
            const double drawn = r[0] + (r[1] - r[0]) * u(rng);
            base[static_cast<std::size_t>(k)] =
                config.effects.empty() ? drawn : config.effects[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        }
        const double drift_period = 40.0 + 40.0 * u(rng);
        const double drift_phase = 2.0 * std::numbers::pi * u(rng);
        ct.seasonal.resize(Tn);
        for (int k = 0; k < 3; ++k) ct.effects[static_cast<std::size_t>(k)].resize(Tn);
        for (int t = 0; t < T; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            ct.seasonal[ti] = config.seasonal_amplitude * std::sin(2.0 * std::numbers::pi * t / 52.0);
            const double drift =
                1.0 + config.effect_variation * std::sin(2.0 * std::numbers::pi * t / drift_period + drift_phase);
            for (std::size_t k = 0; k < 3; ++k) ct.effects[k][ti] = base[k] * drift;
        }

        auto& p = paths[static_cast<std::size_t>(c)];
        for (std::size_t k = 0; k < 3; ++k)
            p.discount[k] = detail::regime_path(rng, T, config.discount_max[k], config.regime_switch_prob,
                                                config.zero_regime_prob);
        p.depth = 0.15 + 0.15 * u(rng);
        double price = 2.0 + 8.0 * u(rng);
        p.base_price.resize(Tn);
        for (auto& b : p.base_price) {
            if (u(rng) < 0.02) price *= std::exp(0.03 * gauss(rng));
            b = price;
        }
        truth.categories.push_back(std::move(ct));
    }

    // LSG-level discount paths (shared path plus persistent perturbation).
    auto lsg_discounts = [&](int z, int c) {
        std::array<std::vector<double>, 3> d;
        Rng rng(mix_seed(config.seed, 2, z, c));
        std::uniform_real_distribution<double> uu(0.0, 1.0);
        for (std::size_t k = 0; k < 3; ++k) {
            const auto& shared = paths[static_cast<std::size_t>(c)].discount[k];
            d[k].resize(Tn);
            double offset = config.lsg_discount_perturbation * gauss(rng);
            for (std::size_t t = 0; t < Tn; ++t) {
                if (uu(rng) < 0.1) offset = config.lsg_discount_perturbation * gauss(rng);
                d[k][t] = shared[t] == 0.0 ? 0.0 : std::clamp(shared[t] + offset, 0.0, 100.0);
            }
        }
        return d;
    };

    std::vector<std::vector<std::array<std::vector<double>, 3>>> discounts(static_cast<std::size_t>(config.n_lsg));
    for (int z = 0; z < config.n_lsg; ++z)
        for (int c = 0; c < config.n_category; ++c) discounts[static_cast<std::size_t>(z)].push_back(lsg_discounts(z, c));

    for (int z = 0; z < config.n_lsg; ++z) {
        const auto zi = static_cast<std::size_t>(z);
        const double scale = config.lsg_scales.empty() ? 1.0 : config.lsg_scales[zi];
        const double sd = config.noise_sd.empty() ? 0.05 : config.noise_sd[zi];
        for (int c = 0; c < config.n_category; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            const auto& ct = truth.categories[ci];
            const auto& p = paths[ci];
            const auto& d = discounts[zi][ci];
            Rng rng(mix_seed(config.seed, 3, z, c));
            std::normal_distribution<double> noise(0.0, 1.0);

            Series s;
            s.key = {synth_lsg_id(z), ct.category_id};
            s.first_week = 0;
            s.resize(Tn);
            for (std::size_t t = 0; t < Tn; ++t) {
                s.tpr_pct[t] = d[0][t];
                s.adfront_pct[t] = d[1][t];
                s.dspback_pct[t] = d[2][t];
                s.base_price[t] = p.base_price[t];
                const double price_noise = std::exp(0.005 * noise(rng));
                s.net_price[t] = std::min(p.base_price[t], p.base_price[t] * (1.0 - p.depth * d[0][t] / 100.0) * price_noise);

                double log_rev = std::log(scale) + ct.log_level + ct.seasonal[t] + holiday_log[t];
                for (std::size_t k = 0; k < 3; ++k) log_rev += ct.effects[k][t] * d[k][t];
                for (const auto& x : config.cross_effects)
                    if (x.target == c) log_rev += x.coefficient * discounts[zi][static_cast<std::size_t>(x.source)][0][t];
                log_rev += config.price_elasticity * std::log(s.net_price[t] / s.base_price[t]);
                const double eps = noise(rng);
                if (sd > 0.0) log_rev += sd * eps;
                s.revenue[t] = std::exp(log_rev);
            }
            out.panel.add(std::move(s));
        }
    }
    return out;
}

/// Long format: week,category_id,quantity,value. Static quantities leave the
/// week empty; holiday rows leave the category empty.
inline void write_ground_truth(std::ostream& out, const GroundTruth& truth) {
    out << "week,category_id,quantity,value\n";
    for (const auto& c : truth.categories) {
        csv::write_row(out, {"", c.category_id, "log_level", csv::format_double(c.log_level)});
        for (int t = 0; t < truth.n_weeks; ++t) {
            const auto ti = static_cast<std::size_t>(t);
            const auto w = std::to_string(t);
            csv::write_row(out, {w, c.category_id, "seasonal", csv::format_double(c.seasonal[ti])});
            for (std::size_t k = 0; k < 3; ++k)
                csv::write_row(out, {w, c.category_id, "effect_" + std::string(kDiscountNames[k]),
                                     csv::format_double(c.effects[k][ti])});
        }
    }
    for (const auto& x : truth.cross_effects)
        csv::write_row(out, {"", synth_category_id(x.target), "cross_tpr_pct:" + synth_category_id(x.source),
                             csv::format_double(x.coefficient)});
    for (const auto& h : truth.holidays)
        csv::write_row(out, {std::to_string(h.week), "", "holiday_multiplier", csv::format_double(h.multiplier)});
}

struct GroundTruthRow {
    std::optional<int> week;
    std::string category_id;
    std::string quantity;
    double value = 0.0;
};

inline std::vector<GroundTruthRow> read_ground_truth(std::istream& in) {
    csv::LineReader reader(in);
    std::string line;
    if (!reader.next(line) || line != "week,category_id,quantity,value")
        throw SchemaError("ground truth header mismatch", 1);
    std::vector<GroundTruthRow> rows;
    while (reader.next(line)) {
        if (line.empty()) continue;
        const auto f = csv::split(line);
        if (f.size() != 4) throw SchemaError("ground truth row needs 4 fields", reader.line_no());
        GroundTruthRow r;
        if (!f[0].empty()) r.week = static_cast<int>(csv::parse_int(f[0], reader.line_no(), "week"));
        r.category_id = std::string(f[1]);
        r.quantity = std::string(f[2]);
        r.value = csv::parse_double(f[3], reader.line_no(), "value");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace revcast
