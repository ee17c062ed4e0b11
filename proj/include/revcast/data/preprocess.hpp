#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "revcast/data/panel.hpp"
#include "revcast/random.hpp"

namespace revcast {

struct PreprocessConfig {
    double negligible_threshold = 0.5;  // percentage points
    double jitter_trigger = 0.25;       // within-series sd below which noise is added
    double jitter_sd = 0.1;
    std::uint64_t seed = 17;
};

struct PreprocessResult {
    Panel panel;
    PreprocessReport report;
};

namespace detail {

inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace detail

/// Drops category discounts that are negligible everywhere and jitters
/// near-static series. A panel that already carries a report is returned
/// as is.
inline PreprocessResult preprocess(const Panel& panel, const PreprocessConfig& config = {}) {
    if (panel.preprocessing()) return {panel, *panel.preprocessing()};

    PreprocessResult out{panel, {}};
    auto& report = out.report;
    report.negligible_threshold = config.negligible_threshold;
    report.jitter_trigger = config.jitter_trigger;
    report.jitter_sd = config.jitter_sd;
    report.seed = config.seed;

    std::map<std::string, std::array<double, 3>> category_max;
    for (const auto& s : panel.series()) {
        auto [it, inserted] = category_max.try_emplace(s.key.category_id, std::array<double, 3>{-1.0, -1.0, -1.0});
        for (std::size_t k = 0; k < kDiscountNames.size(); ++k) {
            const auto& v = s.discount(kDiscountNames[k]);
            if (!v.empty()) it->second[k] = std::max(it->second[k], *std::max_element(v.begin(), v.end()));
        }
    }
    for (const auto& [cat, maxes] : category_max) {
        for (std::size_t k = 0; k < kDiscountNames.size(); ++k) {
            if (maxes[k] < config.negligible_threshold) {
                out.panel.exclude(cat, std::string(kDiscountNames[k]));
                report.actions.push_back(
                    {PreprocessAction::Kind::dropped, cat, {}, std::string(kDiscountNames[k]), maxes[k]});
            }
        }
    }

    for (auto& s : out.panel.series()) {
        const auto& excluded = out.panel.excluded(s.key.category_id);
        for (std::size_t k = 0; k < kDiscountNames.size(); ++k) {
            const std::string name(kDiscountNames[k]);
            if (excluded.contains(name)) continue;
            auto& v = s.discount(name);
            const double sd = detail::sample_sd(v);
            if (sd >= config.jitter_trigger) continue;
            Rng rng(mix_seed(config.seed, hash_string(s.key.lsg_id), hash_string(s.key.category_id), k));
            std::normal_distribution<double> noise(0.0, config.jitter_sd);
            for (double& x : v) x = std::clamp(x + noise(rng), 0.0, 100.0);
            report.actions.push_back({PreprocessAction::Kind::jittered, s.key.category_id, s.key.lsg_id, name, sd});
        }
    }
    out.panel.set_preprocessing(report);
    return out;
}

}  // namespace revcast
